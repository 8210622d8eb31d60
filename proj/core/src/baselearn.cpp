#include "truecluster/baselearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "truecluster/error.hpp"

namespace truecluster {

std::string_view to_string(ResampleScheme scheme) noexcept {
    return scheme == ResampleScheme::bootstrap ? "bootstrap" : "subsample";
}

std::string_view to_string(BaseKind kind) noexcept {
    switch (kind) {
        case BaseKind::kmeans: return "kmeans";
        case BaseKind::pam: return "pam";
        case BaseKind::single_link: return "slink";
    }
    return "unknown";
}

std::string_view to_string(PredictKind kind) noexcept {
    return kind == PredictKind::representative ? "rep" : "nn1";
}

ResampleIndices draw_resample(std::size_t n_cases, std::size_t n, ResampleScheme scheme, Rng& rng) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "resample size must be at least 1");
    if (n_cases == 0) throw Error(ErrorCode::InvalidArgument, "cannot resample from an empty dataset");
    ResampleIndices out{std::vector<std::size_t>(n), scheme};
    for (auto& idx : out.indices) idx = rng.uniform_index(n_cases);
    return out;
}

DistinctCases distinct_cases(std::span<const std::size_t> resample) {
    std::vector<std::size_t> sorted(resample.begin(), resample.end());
    std::sort(sorted.begin(), sorted.end());
    DistinctCases out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        out.cases.push_back(sorted[i]);
        out.weights.push_back(static_cast<double>(j - i));
        i = j;
    }
    return out;
}

PairwiseDistances::PairwiseDistances(const Matrix<double>& data) : table_(data.rows(), data.rows(), 0.0) {
    for (std::size_t i = 0; i < data.rows(); ++i)
        for (std::size_t j = i + 1; j < data.rows(); ++j) {
            const double d = std::sqrt(squared_distance(data.row(i), data.row(j)));
            table_(i, j) = d;
            table_(j, i) = d;
        }
}

namespace {

Matrix<double> local_distances(const Matrix<double>& data, std::span<const std::size_t> cases, const PairwiseDistances* cache) {
    const std::size_t m = cases.size();
    Matrix<double> d(m, m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            const double v = cache ? (*cache)(cases[a], cases[b]) : std::sqrt(squared_distance(data.row(cases[a]), data.row(cases[b])));
            d(a, b) = v;
            d(b, a) = v;
        }
    return d;
}

Matrix<double> gather_rows(const Matrix<double>& data, std::span<const std::size_t> rows) {
    Matrix<double> out(rows.size(), data.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) std::copy_n(data.row(rows[r]).begin(), data.cols(), out.row(r).begin());
    return out;
}

// Every distinct case becomes its own cluster; used when fewer distinct
// cases than clusters were drawn.
FittedBaseModel singleton_model(BaseKind kind, const Matrix<double>& data, DistinctCases distinct, std::size_t k) {
    FittedBaseModel model;
    model.kind = kind;
    model.k = k;
    model.cases = std::move(distinct.cases);
    model.assignment.k = k;
    model.assignment.labels.resize(model.cases.size());
    std::iota(model.assignment.labels.begin(), model.assignment.labels.end(), Label{0});
    model.representatives = gather_rows(data, model.cases);
    model.representative_labels = model.assignment.labels;
    if (kind == BaseKind::pam) model.medoids = model.cases;
    model.degenerate = model.cases.size() < k;
    return model;
}

std::size_t nearest_row(const Matrix<double>& reps, std::span<const double> x, double* best_distance = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reps.rows(); ++r) {
        const double d = squared_distance(reps.row(r), x);
        if (d < best_d) {
            best_d = d;
            best = r;
        }
    }
    if (best_distance) *best_distance = best_d;
    return best;
}

}  // namespace

FittedBaseModel fit_kmeans(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, Rng& rng,
                           const KMeansOptions& options) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    DistinctCases distinct = distinct_cases(resample);
    const std::size_t m = distinct.cases.size();
    if (m <= k) return singleton_model(BaseKind::kmeans, data, std::move(distinct), k);

    const std::size_t dims = data.cols();
    const Matrix<double> points = gather_rows(data, distinct.cases);
    const auto& w = distinct.weights;

    // k-means++ seeding on distinct points, so no two initial centers coincide
    // in index; D^2 weights times multiplicity.
    Matrix<double> centers(k, dims);
    std::vector<bool> chosen(m, false);
    std::vector<double> d2(m, std::numeric_limits<double>::infinity());
    auto pick_weighted = [&](const std::vector<double>& mass) {
        const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
        if (!(total > 0.0)) {
            for (std::size_t i = 0; i < m; ++i)
                if (!chosen[i]) return i;
        }
        double u = rng.uniform01() * total;
        std::size_t last = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (mass[i] <= 0.0) continue;
            last = i;
            if (u < mass[i]) return i;
            u -= mass[i];
        }
        return last;
    };
    std::vector<double> mass(w);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t pick = pick_weighted(mass);
        chosen[pick] = true;
        std::copy_n(points.row(pick).begin(), dims, centers.row(c).begin());
        for (std::size_t i = 0; i < m; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.row(i), centers.row(c)));
            mass[i] = chosen[i] ? 0.0 : w[i] * d2[i];
        }
    }

    FittedBaseModel model;
    model.kind = BaseKind::kmeans;
    model.k = k;
    model.assignment.k = k;
    model.assignment.labels.assign(m, 0);
    std::vector<double> counts(k);
    Matrix<double> sums(k, dims);
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        double wss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double d = 0.0;
            model.assignment.labels[i] = static_cast<Label>(nearest_row(centers, points.row(i), &d));
            wss += w[i] * d;
        }
        model.objective_trace.push_back(wss);

        std::fill(counts.begin(), counts.end(), 0.0);
        std::fill(sums.data().begin(), sums.data().end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const Label l = model.assignment.labels[i];
            counts[l] += w[i];
            auto s = sums.row(l);
            const auto p = points.row(i);
            for (std::size_t j = 0; j < dims; ++j) s[j] += w[i] * p[j];
        }
        double movement = 0.0;
        double scale = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            auto center = centers.row(c);
            scale = std::max(scale, std::sqrt(std::inner_product(center.begin(), center.end(), center.begin(), 0.0)));
            if (counts[c] == 0.0) continue;  // empty cluster keeps its center
            double shift = 0.0;
            for (std::size_t j = 0; j < dims; ++j) {
                const double updated = sums(c, j) / counts[c];
                shift += (updated - center[j]) * (updated - center[j]);
                center[j] = updated;
            }
            movement = std::max(movement, std::sqrt(shift));
        }
        if (movement <= options.tolerance * std::max(scale, 1e-300)) break;
    }
    double wss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double d = 0.0;
        model.assignment.labels[i] = static_cast<Label>(nearest_row(centers, points.row(i), &d));
        wss += w[i] * d;
    }
    model.objective = wss;
    model.objective_trace.push_back(wss);
    model.cases = std::move(distinct.cases);
    model.representatives = std::move(centers);
    model.representative_labels.resize(k);
    std::iota(model.representative_labels.begin(), model.representative_labels.end(), Label{0});
    model.degenerate = model.assignment.occupied() < k;
    return model;
}

FittedBaseModel fit_pam(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, const PairwiseDistances* distances) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    DistinctCases distinct = distinct_cases(resample);
    const std::size_t m = distinct.cases.size();
    if (m <= k) return singleton_model(BaseKind::pam, data, std::move(distinct), k);

    const Matrix<double> d = local_distances(data, distinct.cases, distances);
    const auto& w = distinct.weights;
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> medoids;  // positions into distinct.cases
    std::vector<bool> is_medoid(m, false);
    std::vector<double> nearest_d(m, inf);

    // BUILD
    {
        std::size_t first = 0;
        double best = inf;
        for (std::size_t c = 0; c < m; ++c) {
            double cost = 0.0;
            for (std::size_t o = 0; o < m; ++o) cost += w[o] * d(o, c);
            if (cost < best) {
                best = cost;
                first = c;
            }
        }
        medoids.push_back(first);
        is_medoid[first] = true;
        for (std::size_t o = 0; o < m; ++o) nearest_d[o] = d(o, first);
    }
    while (medoids.size() < k) {
        std::size_t pick = m;
        double best_gain = -1.0;
        for (std::size_t c = 0; c < m; ++c) {
            if (is_medoid[c]) continue;
            double gain = 0.0;
            for (std::size_t o = 0; o < m; ++o) gain += w[o] * std::max(nearest_d[o] - d(o, c), 0.0);
            if (gain > best_gain) {
                best_gain = gain;
                pick = c;
            }
        }
        medoids.push_back(pick);
        is_medoid[pick] = true;
        for (std::size_t o = 0; o < m; ++o) nearest_d[o] = std::min(nearest_d[o], d(o, pick));
    }

    // SWAP: best single exchange per pass, evaluated for all medoids of a
    // candidate at once from nearest/second-nearest medoid distances.
    std::vector<std::size_t> near_slot(m);
    std::vector<double> second_d(m);
    auto refresh = [&] {
        double total = 0.0;
        for (std::size_t o = 0; o < m; ++o) {
            double d1 = inf, d2 = inf;
            std::size_t s1 = 0;
            for (std::size_t s = 0; s < k; ++s) {
                const double v = d(o, medoids[s]);
                if (v < d1) {
                    d2 = d1;
                    d1 = v;
                    s1 = s;
                } else if (v < d2) {
                    d2 = v;
                }
            }
            near_slot[o] = s1;
            nearest_d[o] = d1;
            second_d[o] = d2;
            total += w[o] * d1;
        }
        return total;
    };

    FittedBaseModel model;
    model.kind = BaseKind::pam;
    model.k = k;
    double objective = refresh();
    model.objective_trace.push_back(objective);
    std::vector<double> delta(k);
    for (std::size_t pass = 0; pass < 10000; ++pass) {
        double best_delta = 0.0;
        std::size_t best_c = m, best_slot = k;
        for (std::size_t c = 0; c < m; ++c) {
            if (is_medoid[c]) continue;
            double shared = 0.0;
            std::fill(delta.begin(), delta.end(), 0.0);
            for (std::size_t o = 0; o < m; ++o) {
                const double doc = d(o, c);
                const double gain_any = std::min(doc - nearest_d[o], 0.0);
                shared += w[o] * gain_any;
                delta[near_slot[o]] += w[o] * (std::min(second_d[o], doc) - nearest_d[o] - gain_any);
            }
            for (std::size_t s = 0; s < k; ++s) {
                const double total = shared + delta[s];
                if (total < best_delta) {
                    best_delta = total;
                    best_c = c;
                    best_slot = s;
                }
            }
        }
        if (best_c == m || best_delta >= -1e-12 * (1.0 + objective)) break;
        is_medoid[medoids[best_slot]] = false;
        medoids[best_slot] = best_c;
        is_medoid[best_c] = true;
        objective = refresh();
        model.objective_trace.push_back(objective);
    }

    model.objective = objective;
    model.assignment.k = k;
    model.assignment.labels.resize(m);
    for (std::size_t o = 0; o < m; ++o) model.assignment.labels[o] = static_cast<Label>(near_slot[o]);
    model.medoids.resize(k);
    std::vector<std::size_t> medoid_cases(k);
    for (std::size_t s = 0; s < k; ++s) medoid_cases[s] = distinct.cases[medoids[s]];
    model.medoids = medoid_cases;
    model.representatives = gather_rows(data, medoid_cases);
    model.representative_labels.resize(k);
    std::iota(model.representative_labels.begin(), model.representative_labels.end(), Label{0});
    model.cases = std::move(distinct.cases);
    model.degenerate = model.assignment.occupied() < k;
    return model;
}

FittedBaseModel fit_single_link(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k,
                                const PairwiseDistances* distances) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    DistinctCases distinct = distinct_cases(resample);
    const std::size_t m = distinct.cases.size();
    if (m <= k) return singleton_model(BaseKind::single_link, data, std::move(distinct), k);

    const Matrix<double> d = local_distances(data, distinct.cases, distances);

    // Prim's minimum spanning tree; the single-linkage dendrogram is the
    // MST with edges merged in ascending order.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> best(m, inf);
    std::vector<std::size_t> parent(m, 0);
    std::vector<bool> in_tree(m, false);
    std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
    edges.reserve(m - 1);
    best[0] = 0.0;
    for (std::size_t step = 0; step < m; ++step) {
        std::size_t u = m;
        for (std::size_t v = 0; v < m; ++v)
            if (!in_tree[v] && (u == m || best[v] < best[u])) u = v;
        in_tree[u] = true;
        if (step > 0) edges.emplace_back(best[u], std::min(u, parent[u]), std::max(u, parent[u]));
        for (std::size_t v = 0; v < m; ++v)
            if (!in_tree[v] && d(u, v) < best[v]) {
                best[v] = d(u, v);
                parent[v] = u;
            }
    }
    std::sort(edges.begin(), edges.end());

    std::vector<std::size_t> root(m);
    std::iota(root.begin(), root.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t e = 0; e + k < m; ++e) {
        const auto [dist, a, b] = edges[e];
        const std::size_t ra = find(a), rb = find(b);
        if (ra < rb) root[rb] = ra;
        else root[ra] = rb;
    }

    FittedBaseModel model;
    model.kind = BaseKind::single_link;
    model.k = k;
    model.assignment.k = k;
    model.assignment.labels.resize(m);
    std::vector<Label> label_of_root(m, kNoLabel);
    Label next = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = find(i);
        if (label_of_root[r] == kNoLabel) label_of_root[r] = next++;
        model.assignment.labels[i] = label_of_root[r];
    }
    model.representatives = gather_rows(data, distinct.cases);
    model.representative_labels = model.assignment.labels;
    model.cases = std::move(distinct.cases);
    model.degenerate = model.assignment.occupied() < k;
    return model;
}

namespace {

class KMeansLearner final : public BaseLearner {
  public:
    BaseKind kind() const noexcept override { return BaseKind::kmeans; }
    FittedBaseModel fit(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, Rng& rng) const override {
        return fit_kmeans(data, resample, k, rng);
    }
};

class PamLearner final : public BaseLearner {
  public:
    explicit PamLearner(const PairwiseDistances* distances) : distances_(distances) {}
    BaseKind kind() const noexcept override { return BaseKind::pam; }
    FittedBaseModel fit(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, Rng&) const override {
        return fit_pam(data, resample, k, distances_);
    }

  private:
    const PairwiseDistances* distances_;
};

class SingleLinkLearner final : public BaseLearner {
  public:
    explicit SingleLinkLearner(const PairwiseDistances* distances) : distances_(distances) {}
    BaseKind kind() const noexcept override { return BaseKind::single_link; }
    FittedBaseModel fit(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, Rng&) const override {
        return fit_single_link(data, resample, k, distances_);
    }

  private:
    const PairwiseDistances* distances_;
};

}  // namespace

std::unique_ptr<BaseLearner> make_learner(BaseKind kind, const PairwiseDistances* distances) {
    switch (kind) {
        case BaseKind::kmeans: return std::make_unique<KMeansLearner>();
        case BaseKind::pam: return std::make_unique<PamLearner>(distances);
        case BaseKind::single_link: return std::make_unique<SingleLinkLearner>(distances);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown base learner");
}

CrispAssignment predict_nearest_representative(const FittedBaseModel& model, const Matrix<double>& cases) {
    if (model.representatives.rows() == 0) throw Error(ErrorCode::InvalidArgument, "model has no representatives");
    CrispAssignment out{std::vector<Label>(cases.rows()), model.k};
    for (std::size_t i = 0; i < cases.rows(); ++i) {
        double best_d = std::numeric_limits<double>::infinity();
        Label best = kNoLabel;
        for (std::size_t r = 0; r < model.representatives.rows(); ++r) {
            const double dist = squared_distance(model.representatives.row(r), cases.row(i));
            const Label l = model.representative_labels[r];
            if (dist < best_d || (dist == best_d && l < best)) {
                best_d = dist;
                best = l;
            }
        }
        out.labels[i] = best;
    }
    return out;
}

CrispAssignment predict_1nn(const KdTree& index, std::span<const Label> point_labels, std::size_t k, const Matrix<double>& cases) {
    if (point_labels.size() != index.size()) throw Error(ErrorCode::LengthMismatch, "one label slot per indexed point is required");
    if (std::none_of(point_labels.begin(), point_labels.end(), [](Label l) { return l != kNoLabel; }))
        throw Error(ErrorCode::InvalidArgument, "no labelled points to predict from");
    CrispAssignment out{std::vector<Label>(cases.rows()), k};
    for (std::size_t i = 0; i < cases.rows(); ++i) {
        const auto hit = index.nearest(cases.row(i), [&](std::size_t j) { return point_labels[j] != kNoLabel; });
        out.labels[i] = point_labels[hit.index];
    }
    return out;
}

CrispAssignment complete_assignment(const FittedBaseModel& model, const Matrix<double>& data, PredictKind predictor, const KdTree* index,
                                    std::span<const std::size_t> targets) {
    const std::size_t n = data.rows();
    std::vector<Label> fitted(n, kNoLabel);
    for (std::size_t j = 0; j < model.cases.size(); ++j) fitted[model.cases[j]] = model.assignment.labels[j];

    CrispAssignment out{fitted, model.k};
    std::vector<std::size_t> missing;
    if (targets.empty()) {
        for (std::size_t i = 0; i < n; ++i)
            if (fitted[i] == kNoLabel) missing.push_back(i);
    } else {
        for (const std::size_t i : targets)
            if (fitted.at(i) == kNoLabel) missing.push_back(i);
    }
    if (missing.empty()) return out;

    if (predictor == PredictKind::nearest_neighbor) {
        if (!index) throw Error(ErrorCode::InvalidArgument, "1-NN prediction needs a nearest-neighbour index");
        for (const std::size_t i : missing) {
            const auto hit = index->nearest(data.row(i), [&](std::size_t j) { return fitted[j] != kNoLabel; });
            out.labels[i] = fitted[hit.index];
        }
        return out;
    }
    const CrispAssignment predicted = predict_nearest_representative(model, gather_rows(data, missing));
    for (std::size_t j = 0; j < missing.size(); ++j) out.labels[missing[j]] = predicted.labels[j];
    return out;
}

double mean_silhouette(const PairwiseDistances& distances, const CrispAssignment& assignment) {
    const std::size_t n = assignment.size();
    if (distances.size() != n) throw Error(ErrorCode::LengthMismatch, "distance table and assignment differ in size");
    std::vector<std::size_t> sizes(assignment.k, 0);
    for (const Label l : assignment.labels) ++sizes[l];
    std::vector<double> sum_to(assignment.k);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Label own = assignment.labels[i];
        if (sizes[own] <= 1) continue;
        std::fill(sum_to.begin(), sum_to.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) sum_to[assignment.labels[j]] += distances(i, j);
        const double a = sum_to[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < assignment.k; ++c)
            if (c != own && sizes[c] > 0) b = std::min(b, sum_to[c] / static_cast<double>(sizes[c]));
        if (!std::isfinite(b)) continue;
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

}  // namespace truecluster
