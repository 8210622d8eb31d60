#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "truecluster/cic.hpp"
#include "truecluster/error.hpp"
#include "truecluster/generate.hpp"
#include "truecluster/metrics.hpp"
#include "truecluster/mmcc.hpp"

using namespace truecluster;

namespace {

GeneratedData blobs(std::size_t n, std::size_t k, std::uint64_t seed) {
    GenerateConfig cfg;
    cfg.shape = Shape::blobs;
    cfg.n = n;
    cfg.clusters = k;
    cfg.seed = seed;
    return generate(cfg);
}

MmccConfig config(std::size_t k, std::size_t rounds, BaseKind base = BaseKind::pam) {
    MmccConfig cfg;
    cfg.k = k;
    cfg.resamples = rounds;
    cfg.base = base;
    cfg.seed = 42;
    return cfg;
}

// Four distinct locations, each repeated ten times.
Matrix<double> four_spots() {
    Matrix<double> x(40, 2);
    for (std::size_t i = 0; i < 40; ++i) {
        x(i, 0) = static_cast<double>(i % 4) * 10.0;
        x(i, 1) = 0.0;
    }
    return x;
}

}  // namespace

TEST_SUITE("mmcc") {
    TEST_CASE("separated blobs give crisp memberships") {
        const GeneratedData g = blobs(100, 2, 1);
        const MmccContext ctx(g.points, BaseKind::kmeans, PredictKind::representative);
        const MmccResult r = mmcc_fit(ctx, config(2, 100, BaseKind::kmeans));
        int crisp = 0;
        for (std::size_t i = 0; i < 100; ++i)
            if (std::max(r.probs(i, 0), r.probs(i, 1)) >= 0.99) ++crisp;
        CHECK(crisp >= 95);
        CHECK(adjusted_rand_index(r.majority, g.labels) == 1.0);
        for (const double v : cic::gsd(r.probs)) CHECK(v > 0.98);
    }

    TEST_CASE("two rounds give row sums of two") {
        Rng rng(2);
        const Matrix<double> x = tctest::random_points(rng, 30, 2);
        const MmccResult r = mmcc_fit(Dataset(x), config(3, 2));
        for (std::size_t i = 0; i < 30; ++i) CHECK(r.votes.row_sum(i) == 2);
        CHECK(r.rounds_used == 2);
        CHECK(r.cic_trace.size() == 2);
    }

    TEST_CASE("every voting round adds exactly one vote per case") {
        Rng rng(3);
        const Matrix<double> x = tctest::random_points(rng, 50, 3);
        for (const auto scheme : {ResampleScheme::bootstrap, ResampleScheme::subsample}) {
            MmccConfig cfg = config(4, 60);
            cfg.scheme = scheme;
            cfg.resample_size = scheme == ResampleScheme::subsample ? 25 : 0;
            const MmccResult r = mmcc_fit(Dataset(x), cfg);
            for (std::size_t i = 0; i < 50; ++i) CHECK(r.votes.row_sum(i) == r.rounds_used - r.degenerate_rounds);
            CHECK(r.votes.total_resamples() == r.rounds_used - r.degenerate_rounds);
        }
    }

    TEST_CASE("single cluster short-circuits") {
        Rng rng(4);
        const MmccResult r = mmcc_fit(Dataset(tctest::random_points(rng, 20, 2)), config(1, 10));
        for (std::size_t i = 0; i < 20; ++i) CHECK(r.probs(i, 0) == 1.0);
        CHECK(cic::score(r.probs) == 0.0);
    }

    TEST_CASE("degenerate rounds are skipped and counted") {
        const MmccContext ctx(four_spots(), BaseKind::pam, PredictKind::representative);
        MmccConfig cfg = config(4, 200);
        cfg.scheme = ResampleScheme::subsample;
        cfg.resample_size = 6;
        cfg.degenerate_retry_limit = 0;
        const MmccResult r = mmcc_fit(ctx, cfg);
        CHECK(r.rounds_used == 200);
        CHECK(r.degenerate_rounds > 0);
        CHECK(r.degenerate_rounds < 200);
        CHECK(r.votes.total_resamples() == 200 - r.degenerate_rounds);
        CHECK(is_degenerate_model(r, 4));
        cfg.degenerate_retry_limit = 3;
        const MmccResult retried = mmcc_fit(ctx, cfg);
        CHECK(retried.degenerate_rounds < r.degenerate_rounds);
    }

    TEST_CASE("all rounds degenerate is an error") {
        Matrix<double> x(30, 1);
        for (std::size_t i = 0; i < 30; ++i) x(i, 0) = static_cast<double>(i % 3);
        try {
            mmcc_fit(Dataset(x), config(4, 20));
            FAIL("expected AllRoundsDegenerate");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AllRoundsDegenerate);
        }
    }

    TEST_CASE("degenerate model rule") {
        MmccResult r;
        r.rounds_used = 100;
        r.degenerate_rounds = 10;
        r.majority = CrispAssignment{{0, 1, 2}, 3};
        CHECK_FALSE(is_degenerate_model(r, 3));
        r.degenerate_rounds = 11;
        CHECK(is_degenerate_model(r, 3));
        r.degenerate_rounds = 0;
        r.majority = CrispAssignment{{0, 1, 1}, 3};
        CHECK(is_degenerate_model(r, 3));
    }

    TEST_CASE("configuration validation") {
        const Dataset d(Matrix<double>(5, 1, std::vector<double>{1, 2, 3, 4, 5}));
        CHECK_THROWS_AS(mmcc_fit(d, config(2, 1)), Error);
        CHECK_THROWS_AS(mmcc_fit(d, config(0, 10)), Error);
    }

    TEST_CASE("results do not depend on the worker count") {
        Rng rng(5);
        const Matrix<double> x = tctest::random_points(rng, 80, 3);
        for (const auto base : {BaseKind::pam, BaseKind::kmeans, BaseKind::single_link}) {
            const MmccContext ctx(x, base, PredictKind::nearest_neighbor);
            MmccConfig cfg = config(3, 80, base);
            cfg.predictor = PredictKind::nearest_neighbor;
            cfg.threads = 1;
            const MmccResult a = mmcc_fit(ctx, cfg);
            for (const std::size_t t : {2, 8}) {
                cfg.threads = t;
                const MmccResult b = mmcc_fit(ctx, cfg);
                CHECK(a.votes.counts() == b.votes.counts());
                CHECK(a.majority == b.majority);
                CHECK(a.degenerate_rounds == b.degenerate_rounds);
                REQUIRE(a.cic_trace.size() == b.cic_trace.size());
                for (std::size_t i = 0; i < a.cic_trace.size(); ++i) CHECK(a.cic_trace[i] == b.cic_trace[i]);
            }
        }
    }

    TEST_CASE("same seed reproduces, a different seed differs") {
        Rng rng(6);
        const Matrix<double> x = tctest::random_points(rng, 60, 2);
        const MmccContext ctx(x, BaseKind::pam, PredictKind::representative);
        MmccConfig cfg = config(3, 50);
        const MmccResult a = mmcc_fit(ctx, cfg), b = mmcc_fit(ctx, cfg);
        CHECK(a.votes.counts() == b.votes.counts());
        cfg.seed = 43;
        CHECK_FALSE(mmcc_fit(ctx, cfg).votes.counts() == a.votes.counts());
    }

    TEST_CASE("final trace value is the CIC of the result") {
        Rng rng(7);
        const MmccResult r = mmcc_fit(Dataset(tctest::random_points(rng, 40, 2)), config(3, 30));
        CHECK(std::abs(r.cic_trace.back() - cic::score(r.probs)) < 1e-12);
    }

    TEST_CASE("an outlier does not split the blobs") {
        GeneratedData g = blobs(100, 2, 8);
        Matrix<double> x(101, 2);
        for (std::size_t i = 0; i < 100; ++i)
            for (std::size_t j = 0; j < 2; ++j) x(i, j) = g.points(i, j);
        x(100, 0) = 60.0;
        x(100, 1) = 60.0;
        const MmccResult r = mmcc_fit(Dataset(x), config(2, 100));
        CrispAssignment head{std::vector<Label>(r.majority.labels.begin(), r.majority.labels.begin() + 100), 2};
        CHECK(adjusted_rand_index(head, g.labels) == 1.0);
    }

    TEST_CASE("resample rounds are pure in their inputs") {
        Rng rng(9);
        const MmccContext ctx(tctest::random_points(rng, 30, 2), BaseKind::pam, PredictKind::representative);
        const MmccConfig cfg = config(3, 10);
        const RoundOutcome a = resample_round(ctx, cfg, 4), b = resample_round(ctx, cfg, 4);
        CHECK(a.assignment == b.assignment);
        CHECK(a.assignment.size() == 30);
    }

    TEST_CASE("full-sample batches reproduce the unbatched fit") {
        const GeneratedData g = blobs(60, 3, 10);
        const MmccContext ctx(g.points, BaseKind::pam, PredictKind::representative);
        const MmccConfig cfg = config(3, 40);
        std::vector<std::size_t> all(60);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const MmccResult plain = mmcc_fit(ctx, cfg);
        const MmccResult batched = mmcc_fit_batched(ctx, cfg, {all, all});
        CHECK(plain.votes.counts() == batched.votes.counts());
        CHECK(plain.majority == batched.majority);
    }

    TEST_CASE("half-overlapping batches agree with the unbatched majority") {
        const GeneratedData g = blobs(100, 2, 11);
        const MmccContext ctx(g.points, BaseKind::kmeans, PredictKind::representative);
        const MmccConfig cfg = config(2, 60, BaseKind::kmeans);
        const auto batches = make_overlapping_batches(100, 60, 0.5);
        REQUIRE(batches.size() >= 2);
        const MmccResult plain = mmcc_fit(ctx, cfg);
        const MmccResult batched = mmcc_fit_batched(ctx, cfg, batches);
        CHECK(adjusted_rand_index(plain.majority, batched.majority) == 1.0);
    }

    TEST_CASE("batch coverage and overlap are validated") {
        const GeneratedData g = blobs(20, 2, 12);
        const MmccContext ctx(g.points, BaseKind::pam, PredictKind::representative);
        std::vector<std::size_t> without7;
        for (std::size_t i = 0; i < 20; ++i)
            if (i != 7) without7.push_back(i);
        try {
            mmcc_fit_batched(ctx, config(2, 10), {without7, without7});
            FAIL("expected UncoveredCase");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UncoveredCase);
            CHECK(e.index() == std::optional<std::size_t>(7));
        }
        std::vector<std::size_t> low(10), high(10);
        std::iota(low.begin(), low.end(), std::size_t{0});
        std::iota(high.begin(), high.end(), std::size_t{10});
        try {
            mmcc_fit_batched(ctx, config(2, 10), {low, high});
            FAIL("expected InsufficientOverlap");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InsufficientOverlap);
        }
    }

    TEST_CASE("overlapping batch layout") {
        const auto b = make_overlapping_batches(10, 4, 0.5);
        REQUIRE(b.size() == 4);
        CHECK(b[0] == std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(b[1] == std::vector<std::size_t>{2, 3, 4, 5});
        CHECK(b.back() == std::vector<std::size_t>{6, 7, 8, 9});
    }

    TEST_CASE("convergence check") {
        const std::vector<double> flat(50, 0.3);
        CHECK(check_convergence(flat, 10, 0.005));
        CHECK(check_convergence(flat, 50, 0.005));
        CHECK_FALSE(check_convergence(flat, 51, 0.005));
        std::vector<double> wobble(50);
        for (std::size_t i = 0; i < 50; ++i) wobble[i] = (i % 2 ? 0.01 : 0.0);
        CHECK_FALSE(check_convergence(wobble, 10, 0.005));
        CHECK_FALSE(check_convergence(flat, 10, 0.005, 5));
        std::vector<double> with_nan(flat);
        with_nan[45] = std::nan("");
        CHECK_FALSE(check_convergence(with_nan, 10, 0.005));
    }

    TEST_CASE("early stopping ends before the round budget on stable data") {
        const GeneratedData g = blobs(80, 2, 13);
        MmccConfig cfg = config(2, 1000, BaseKind::kmeans);
        cfg.early_stop = true;
        cfg.window = 50;
        const MmccResult r = mmcc_fit(Dataset(g.points), cfg);
        CHECK(r.rounds_used < 1000);
        CHECK(r.rounds_used >= 50);
    }
}
