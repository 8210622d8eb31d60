#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "support.hpp"
#include "truecluster/baselearn.hpp"
#include "truecluster/error.hpp"
#include "truecluster/generate.hpp"
#include "truecluster/metrics.hpp"

using namespace truecluster;

namespace {

std::vector<std::size_t> all_cases(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

// Full-length labels of the fitted cases (resample covers every case).
CrispAssignment fitted_labels(const FittedBaseModel& m, std::size_t n) {
    CrispAssignment a{std::vector<Label>(n, kNoLabel), m.k};
    for (std::size_t j = 0; j < m.cases.size(); ++j) a.labels[m.cases[j]] = m.assignment.labels[j];
    return a;
}

GeneratedData blobs(std::size_t n, std::size_t k, std::uint64_t seed) {
    GenerateConfig cfg;
    cfg.shape = Shape::blobs;
    cfg.n = n;
    cfg.clusters = k;
    cfg.seed = seed;
    return generate(cfg);
}

std::size_t linear_scan(const Matrix<double>& pts, std::span<const double> q, const std::vector<bool>& allowed) {
    std::size_t best = KdTree::npos;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.rows(); ++j) {
        if (!allowed[j]) continue;
        const double d = squared_distance(pts.row(j), q);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

// Exhaustive k-medoid objective over all k-subsets.
double best_medoid_objective(const Matrix<double>& x, std::size_t k) {
    const std::size_t n = x.rows();
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (pick[j]) m = std::min(m, std::sqrt(squared_distance(x.row(i), x.row(j))));
            total += m;
        }
        best = std::min(best, total);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

// Naive agglomerative single linkage down to k clusters.
CrispAssignment naive_single_link(const Matrix<double>& x, std::size_t k) {
    const std::size_t n = x.rows();
    std::vector<Label> cluster(n);
    std::iota(cluster.begin(), cluster.end(), Label{0});
    std::size_t groups = n;
    while (groups > k) {
        double best = std::numeric_limits<double>::infinity();
        Label ba = 0, bb = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (cluster[i] == cluster[j]) continue;
                const double d = squared_distance(x.row(i), x.row(j));
                if (d < best) {
                    best = d;
                    ba = cluster[i];
                    bb = cluster[j];
                }
            }
        for (auto& c : cluster)
            if (c == bb) c = ba;
        --groups;
    }
    // Compact labels to [0, k).
    std::vector<Label> remap(n, kNoLabel);
    Label next = 0;
    CrispAssignment out{std::vector<Label>(n), k};
    for (std::size_t i = 0; i < n; ++i) {
        if (remap[cluster[i]] == kNoLabel) remap[cluster[i]] = next++;
        out.labels[i] = remap[cluster[i]];
    }
    return out;
}

}  // namespace

TEST_SUITE("baselearn") {
    TEST_CASE("bootstrap distinct fraction") {
        double total = 0.0;
        for (std::uint64_t s = 0; s < 10000; ++s) {
            Rng rng(s);
            const ResampleIndices r = draw_resample(200, 200, ResampleScheme::bootstrap, rng);
            total += static_cast<double>(distinct_cases(r.indices).cases.size()) / 200.0;
        }
        const double expected = 1.0 - std::pow(1.0 - 1.0 / 200.0, 200.0);
        CHECK(std::abs(total / 10000.0 - expected) < 0.002);
    }

    TEST_CASE("subsample size and single-case draws") {
        Rng rng(1);
        const ResampleIndices r = draw_resample(200, 100, ResampleScheme::subsample, rng);
        CHECK(r.indices.size() == 100);
        for (const auto i : r.indices) CHECK(i < 200);
        const ResampleIndices one = draw_resample(1, 5, ResampleScheme::bootstrap, rng);
        CHECK(one.indices == std::vector<std::size_t>(5, 0));
    }

    TEST_CASE("distinct cases with multiplicities") {
        const std::vector<std::size_t> r{4, 1, 4, 4, 0};
        const DistinctCases d = distinct_cases(r);
        CHECK(d.cases == std::vector<std::size_t>{0, 1, 4});
        CHECK(d.weights == std::vector<double>{1, 1, 3});
    }

    TEST_CASE("kd-tree matches a linear scan") {
        Rng rng(2);
        const std::array<std::size_t, 4> dims{1, 2, 5, 20};
        for (int t = 0; t < 1000; ++t) {
            const std::size_t m = dims[static_cast<std::size_t>(t) % 4];
            const std::size_t n = 1 + rng.uniform_index(300);
            Matrix<double> pts = tctest::random_points(rng, n, m);
            // Coarse grids force exact ties between points.
            if (t % 5 == 0)
                for (auto& v : pts.data()) v = std::round(v * 2.0);
            const KdTree tree(pts, 1 + rng.uniform_index(20));
            std::vector<bool> allowed(n, true);
            if (t % 3 == 0)
                for (std::size_t j = 0; j < n; ++j) allowed[j] = rng.uniform01() < 0.5;
            const Matrix<double> queries = tctest::random_points(rng, 20, m);
            for (std::size_t q = 0; q < queries.rows(); ++q) {
                std::vector<double> query(queries.row(q).begin(), queries.row(q).end());
                if (t % 5 == 0)
                    for (auto& v : query) v = std::round(v * 2.0);
                const auto hit = tree.nearest(query, [&](std::size_t j) { return allowed[j]; });
                CHECK(hit.index == linear_scan(pts, query, allowed));
            }
        }
    }

    TEST_CASE("nearest representative prediction and tie rule") {
        FittedBaseModel m;
        m.k = 3;
        m.representatives = Matrix<double>(3, 1, std::vector<double>{0.0, 5.0, 10.0});
        m.representative_labels = {0, 1, 2};
        const Matrix<double> cases(3, 1, std::vector<double>{5.0, 7.5, 2.5});
        const CrispAssignment p = predict_nearest_representative(m, cases);
        CHECK(p.labels == std::vector<Label>{1, 1, 0});

        Rng rng(3);
        const Matrix<double> pts = tctest::random_points(rng, 30, 3);
        m.representatives = Matrix<double>(4, 3);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t j = 0; j < 3; ++j) m.representatives(r, j) = pts(r, j);
        m.k = 4;
        m.representative_labels = {0, 1, 2, 3};
        const CrispAssignment q = predict_nearest_representative(m, pts);
        std::vector<bool> allowed(4, true);
        for (std::size_t i = 0; i < 30; ++i) CHECK(q.labels[i] == linear_scan(m.representatives, pts.row(i), allowed));
    }

    TEST_CASE("1-NN prediction rules") {
        const Matrix<double> pts(4, 1, std::vector<double>{0.0, 1.0, 1.0, 5.0});
        const KdTree tree(pts);
        const std::vector<Label> labels{0, 1, 0, kNoLabel};
        const Matrix<double> cases(3, 1, std::vector<double>{1.0, 0.1, 4.0});
        // Duplicate nearest points with different labels: the lower row wins.
        CHECK(predict_1nn(tree, labels, 2, cases).labels == std::vector<Label>{1, 0, 1});

        FittedBaseModel m;
        m.k = 2;
        m.cases = {0, 1};
        m.assignment = CrispAssignment{{1, 0}, 2};
        const CrispAssignment full = complete_assignment(m, pts, PredictKind::nearest_neighbor, &tree);
        CHECK(full.labels[0] == 1);
        CHECK(full.labels[1] == 0);
        CHECK(full.labels[2] == 0);
        CHECK(full.labels[3] == 0);
        CHECK_THROWS_AS(complete_assignment(m, pts, PredictKind::nearest_neighbor, nullptr), Error);
    }

    TEST_CASE("1-NN prediction matches a linear scan in ten dimensions") {
        Rng rng(4);
        const Matrix<double> pts = tctest::random_points(rng, 400, 10);
        const KdTree tree(pts);
        std::vector<Label> labels(400, kNoLabel);
        std::vector<bool> allowed(400, false);
        for (std::size_t j = 0; j < 400; j += 2) {
            labels[j] = static_cast<Label>(rng.uniform_index(3));
            allowed[j] = true;
        }
        const Matrix<double> cases = tctest::random_points(rng, 1000, 10);
        const CrispAssignment p = predict_1nn(tree, labels, 3, cases);
        for (std::size_t i = 0; i < 1000; ++i) CHECK(p.labels[i] == labels[linear_scan(pts, cases.row(i), allowed)]);
    }

    TEST_CASE("k-means separates blobs") {
        const GeneratedData g = blobs(200, 2, 5);
        Rng rng(1);
        const FittedBaseModel m = fit_kmeans(g.points, all_cases(200), 2, rng);
        CHECK_FALSE(m.degenerate);
        CHECK(adjusted_rand_index(fitted_labels(m, 200), g.labels) == 1.0);
    }

    TEST_CASE("k-means with one cluster returns the mean") {
        Rng data_rng(6);
        const Matrix<double> x = tctest::random_points(data_rng, 50, 3);
        Rng rng(1);
        const FittedBaseModel m = fit_kmeans(x, all_cases(50), 1, rng);
        for (const Label l : m.assignment.labels) CHECK(l == 0);
        for (std::size_t j = 0; j < 3; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < 50; ++i) mean += x(i, j);
            CHECK(std::abs(m.representatives(0, j) - mean / 50.0) < 1e-12);
        }
    }

    TEST_CASE("fewer distinct points than clusters is degenerate") {
        Rng data_rng(7);
        const Matrix<double> x = tctest::random_points(data_rng, 10, 2);
        const std::vector<std::size_t> r{1, 1, 4, 7, 4};
        Rng rng(1);
        CHECK(fit_kmeans(x, r, 4, rng).degenerate);
        CHECK(fit_pam(x, r, 4).degenerate);
        CHECK(fit_single_link(x, r, 4).degenerate);
    }

    TEST_CASE("k-means objective decreases with k") {
        const GeneratedData g = blobs(150, 4, 8);
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= 4; ++k) {
            Rng rng(2);
            const FittedBaseModel m = fit_kmeans(g.points, all_cases(150), k, rng);
            CHECK(m.objective <= previous + 1e-9);
            previous = m.objective;
        }
    }

    TEST_CASE("PAM reaches the exhaustive medoid optimum on small blob sets") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            for (std::size_t k = 2; k <= 3; ++k) {
                const GeneratedData g = blobs(12 + 6 * seed % 19, k, seed);
                const std::size_t n = g.points.rows();
                const PairwiseDistances d(g.points);
                const FittedBaseModel m = fit_pam(g.points, all_cases(n), k, &d);
                CHECK(std::abs(m.objective - best_medoid_objective(g.points, k)) < 1e-9);
                CHECK(adjusted_rand_index(fitted_labels(m, n), g.labels) == 1.0);
                std::set<Label> medoid_labels;
                for (const auto c : m.medoids) medoid_labels.insert(g.labels.labels[c]);
                CHECK(medoid_labels.size() == k);
            }
        }
    }

    TEST_CASE("PAM matches the exhaustive optimum on random small sets") {
        Rng rng(9);
        int hits = 0;
        const int trials = 30;
        for (int t = 0; t < trials; ++t) {
            const std::size_t n = 6 + rng.uniform_index(9);
            const std::size_t k = 2 + rng.uniform_index(2);
            const Matrix<double> x = tctest::random_points(rng, n, 2);
            const FittedBaseModel m = fit_pam(x, all_cases(n), k);
            const double oracle = best_medoid_objective(x, k);
            CHECK(m.objective >= oracle - 1e-9);
            if (m.objective <= oracle + 1e-9) ++hits;
        }
        // BUILD+SWAP is a local search; it should still hit the optimum on most tiny sets.
        CHECK(hits >= trials * 8 / 10);
    }

    TEST_CASE("PAM with k equal to n puts every point on its own medoid") {
        Rng rng(10);
        const Matrix<double> x = tctest::random_points(rng, 8, 2);
        const FittedBaseModel m = fit_pam(x, all_cases(8), 8);
        CHECK(m.objective == 0.0);
        CHECK(m.assignment.occupied() == 8);
        std::set<std::size_t> medoids(m.medoids.begin(), m.medoids.end());
        CHECK(medoids.size() == 8);
    }

    TEST_CASE("PAM deduplicates resample indices before BUILD") {
        Rng rng(11);
        const Matrix<double> x = tctest::random_points(rng, 20, 2);
        const std::vector<std::size_t> r{3, 3, 3, 5, 5, 9, 12, 12, 17};
        const FittedBaseModel m = fit_pam(x, r, 3);
        std::set<std::size_t> medoids(m.medoids.begin(), m.medoids.end());
        CHECK(medoids.size() == 3);
        CHECK(m.cases == std::vector<std::size_t>{3, 5, 9, 12, 17});
        // Weighted fit equals the fit on the expanded duplicate list.
        double expanded = 0.0;
        for (const auto c : r) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto med : m.medoids) best = std::min(best, std::sqrt(squared_distance(x.row(c), x.row(med))));
            expanded += best;
        }
        CHECK(std::abs(expanded - m.objective) < 1e-9);
    }

    TEST_CASE("PAM objective does not increase with k") {
        Rng rng(12);
        const Matrix<double> x = tctest::random_points(rng, 60, 2);
        const PairwiseDistances d(x);
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k <= 8; ++k) {
            const double obj = fit_pam(x, all_cases(60), k, &d).objective;
            CHECK(obj <= previous + 1e-9);
            previous = obj;
        }
    }

    TEST_CASE("PAM with and without the distance cache agree") {
        Rng rng(13);
        const Matrix<double> x = tctest::random_points(rng, 40, 3);
        const PairwiseDistances d(x);
        const std::vector<std::size_t> r{0, 2, 2, 5, 7, 9, 11, 11, 13, 20, 25, 30, 39};
        const FittedBaseModel a = fit_pam(x, r, 3, &d), b = fit_pam(x, r, 3);
        CHECK(a.medoids == b.medoids);
        CHECK(a.assignment == b.assignment);
    }

    TEST_CASE("single link equals naive agglomeration") {
        Rng rng(14);
        for (int t = 0; t < 40; ++t) {
            const std::size_t n = 3 + rng.uniform_index(40);
            const std::size_t k = 1 + rng.uniform_index(std::min<std::size_t>(n, 6));
            const Matrix<double> x = tctest::random_points(rng, n, 2);
            const FittedBaseModel m = fit_single_link(x, all_cases(n), k);
            CHECK(adjusted_rand_index(fitted_labels(m, n), naive_single_link(x, k)) == 1.0);
        }
    }

    TEST_CASE("single link recovers two spirals") {
        GenerateConfig cfg;
        cfg.shape = Shape::spiral;
        cfg.n = 400;
        cfg.seed = 3;
        const GeneratedData g = generate(cfg);
        const FittedBaseModel m = fit_single_link(g.points, all_cases(400), 2);
        CHECK(adjusted_rand_index(fitted_labels(m, 400), g.labels) == 1.0);
    }

    TEST_CASE("single link extremes and nesting") {
        Rng rng(15);
        const Matrix<double> x = tctest::random_points(rng, 25, 2);
        const FittedBaseModel one = fit_single_link(x, all_cases(25), 1);
        CHECK(one.assignment.occupied() == 1);
        const FittedBaseModel all = fit_single_link(x, all_cases(25), 25);
        CHECK(all.assignment.occupied() == 25);
        // Cutting at k+1 refines the cut at k.
        for (std::size_t k = 1; k < 10; ++k) {
            const auto coarse = fitted_labels(fit_single_link(x, all_cases(25), k), 25);
            const auto fine = fitted_labels(fit_single_link(x, all_cases(25), k + 1), 25);
            for (std::size_t i = 0; i < 25; ++i)
                for (std::size_t j = 0; j < 25; ++j)
                    if (fine.labels[i] == fine.labels[j]) CHECK(coarse.labels[i] == coarse.labels[j]);
        }
    }

    TEST_CASE("complete assignment keeps resample labels") {
        const GeneratedData g = blobs(60, 2, 16);
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < 60; i += 3) r.push_back(i);
        const FittedBaseModel m = fit_pam(g.points, r, 2);
        const CrispAssignment full = complete_assignment(m, g.points, PredictKind::representative);
        for (std::size_t j = 0; j < m.cases.size(); ++j) CHECK(full.labels[m.cases[j]] == m.assignment.labels[j]);
        CHECK(adjusted_rand_index(full, g.labels) == 1.0);
        const std::vector<std::size_t> targets{1};
        const CrispAssignment part = complete_assignment(m, g.points, PredictKind::representative, nullptr, targets);
        CHECK(part.labels[1] != kNoLabel);
        CHECK(part.labels[2] == kNoLabel);
    }

    TEST_CASE("silhouette approaches one for far separated pairs") {
        const Matrix<double> x(4, 1, std::vector<double>{0.0, 1.0, 1000.0, 1001.0});
        const PairwiseDistances d(x);
        CHECK(mean_silhouette(d, CrispAssignment{{0, 0, 1, 1}, 2}) >= 0.99);
        CHECK(mean_silhouette(d, CrispAssignment{{0, 1, 1, 1}, 2}) < 0.99);
    }

    TEST_CASE("learner factory") {
        CHECK(make_learner(BaseKind::kmeans)->kind() == BaseKind::kmeans);
        CHECK(make_learner(BaseKind::pam)->kind() == BaseKind::pam);
        CHECK(make_learner(BaseKind::single_link)->kind() == BaseKind::single_link);
    }
}
