#include "truecluster/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "truecluster/cic.hpp"
#include "truecluster/error.hpp"
#include "truecluster/matching.hpp"
#include "truecluster/parallel.hpp"

namespace truecluster {

namespace {

std::int64_t choose2(std::int64_t x) noexcept { return x * (x - 1) / 2; }

void require_same_length(const CrispAssignment& a, const CrispAssignment& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "partitions differ in length");
}

// Marginal pair sums from the contingency table of a and b.
struct TablePairs {
    std::int64_t cells = 0;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::int64_t all = 0;
};

TablePairs table_pairs(const CrispAssignment& a, const CrispAssignment& b) {
    require_same_length(a, b);
    const ContingencyTable table = cross_tabulate(a.labels, a.k, b.labels, b.k);
    TablePairs out;
    std::vector<std::int64_t> col_sums(b.k, 0);
    for (std::size_t r = 0; r < a.k; ++r) {
        std::int64_t row_sum = 0;
        for (std::size_t c = 0; c < b.k; ++c) {
            out.cells += choose2(table(r, c));
            row_sum += table(r, c);
            col_sums[c] += table(r, c);
        }
        out.rows += choose2(row_sum);
    }
    for (const auto s : col_sums) out.cols += choose2(s);
    out.all = choose2(static_cast<std::int64_t>(a.size()));
    return out;
}

ContingencyTable padded_table(const CrispAssignment& solution, const CrispAssignment& reference) {
    const std::size_t k = std::max(solution.k, reference.k);
    return cross_tabulate(solution.labels, k, reference.labels, k);
}

double rand_between(const CrispAssignment& a, const CrispAssignment& b) { return rand_index(a, b); }

}  // namespace

PairCounts pair_counts(const CrispAssignment& a, const CrispAssignment& b) {
    const TablePairs t = table_pairs(a, b);
    PairCounts out;
    out.same_same = t.cells;
    out.same_diff = t.rows - t.cells;
    out.diff_same = t.cols - t.cells;
    out.diff_diff = t.all - t.rows - t.cols + t.cells;
    return out;
}

double rand_index(const CrispAssignment& a, const CrispAssignment& b) {
    const PairCounts p = pair_counts(a, b);
    if (p.total() == 0) return 1.0;
    return static_cast<double>(p.same_same + p.diff_diff) / static_cast<double>(p.total());
}

double adjusted_rand_index(const CrispAssignment& a, const CrispAssignment& b) {
    const TablePairs t = table_pairs(a, b);
    if (t.all == 0) return 1.0;
    const double expected = static_cast<double>(t.rows) * static_cast<double>(t.cols) / static_cast<double>(t.all);
    const double maximum = 0.5 * static_cast<double>(t.rows + t.cols);
    if (maximum == expected) return 1.0;
    return (static_cast<double>(t.cells) - expected) / (maximum - expected);
}

CrispAssignment match_to_reference(const CrispAssignment& solution, const CrispAssignment& reference) {
    require_same_length(solution, reference);
    const std::size_t k = std::max(solution.k, reference.k);
    const Permutation perm = align_labels(padded_table(solution, reference), MatcherKind::exact, std::max(k, kDefaultExactMatchingBound));
    CrispAssignment out{std::vector<Label>(solution.size()), k};
    for (std::size_t i = 0; i < solution.size(); ++i) out.labels[i] = perm[solution.labels[i]];
    return out;
}

AgreementReport agreement(const CrispAssignment& a, const CrispAssignment& b) {
    require_same_length(a, b);
    AgreementReport report;
    report.rand = rand_index(a, b);
    report.crand = adjusted_rand_index(a, b);

    const std::size_t k = std::max(a.k, b.k);
    const ContingencyTable table = padded_table(a, b);
    const Permutation perm = align_labels(table, MatcherKind::exact, std::max(k, kDefaultExactMatchingBound));
    const auto n = static_cast<double>(a.size());
    std::vector<double> row_sums(k, 0.0), col_sums(k, 0.0);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) {
            row_sums[r] += static_cast<double>(table(r, c));
            col_sums[c] += static_cast<double>(table(r, c));
        }
    const double observed = static_cast<double>(trace_objective(table, perm)) / n;
    double expected = 0.0;
    for (std::size_t r = 0; r < k; ++r) expected += row_sums[r] * col_sums[perm[r]] / (n * n);
    report.fraction_matched = observed;
    report.kappa = expected < 1.0 ? (observed - expected) / (1.0 - expected) : (observed == 1.0 ? 1.0 : 0.0);
    return report;
}

std::string failure_codes(const CrispAssignment& truth, const CrispAssignment& solution, const CrispAssignment& standard) {
    require_same_length(truth, solution);
    require_same_length(truth, standard);
    const CrispAssignment s = match_to_reference(solution, truth);
    const CrispAssignment p = match_to_reference(standard, truth);
    std::string codes(truth.size(), 'o');
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool solution_fails = s.labels[i] != truth.labels[i];
        const bool standard_fails = p.labels[i] != truth.labels[i];
        codes[i] = solution_fails ? (standard_fails ? 'x' : 't') : (standard_fails ? 's' : 'o');
    }
    return codes;
}

NullSimConfig null_reference_from(const Matrix<double>& data) {
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "covariance needs at least 2 cases");
    NullSimConfig cfg;
    cfg.mean.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) cfg.mean[j] += data(i, j);
    for (auto& v : cfg.mean) v /= static_cast<double>(n);
    cfg.covariance = Matrix<double>(m, m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) cfg.covariance(a, b) += (data(i, a) - cfg.mean[a]) * (data(i, b) - cfg.mean[b]);
    for (auto& v : cfg.covariance.data()) v /= static_cast<double>(n - 1);
    return cfg;
}

namespace {

Matrix<double> cholesky_factor(const Matrix<double>& covariance) {
    const auto m = static_cast<Eigen::Index>(covariance.rows());
    if (covariance.cols() != covariance.rows() || m == 0) throw Error(ErrorCode::DegenerateCovariance, "covariance must be square");
    Eigen::MatrixXd cov(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) cov(a, b) = covariance(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    if (!cov.allFinite() || !cov.isApprox(cov.transpose(), 1e-12))
        throw Error(ErrorCode::DegenerateCovariance, "covariance is not a finite symmetric matrix");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-10;
        llt.compute(cov);
        if (llt.info() != Eigen::Success) throw Error(ErrorCode::DegenerateCovariance, "covariance is not positive semi-definite");
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    Matrix<double> out(covariance.rows(), covariance.rows(), 0.0);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) out(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = lower(a, b);
    return out;
}

Matrix<double> draw_normal(const std::vector<double>& mean, const Matrix<double>& lower, std::size_t n, Rng& rng) {
    const std::size_t m = mean.size();
    Matrix<double> out(n, m);
    std::vector<double> z(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : z) v = rng.normal();
        for (std::size_t a = 0; a < m; ++a) {
            double v = mean[a];
            for (std::size_t b = 0; b <= a; ++b) v += lower(a, b) * z[b];
            out(i, a) = v;
        }
    }
    return out;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

CrispAssignment predict_onto(const FittedBaseModel& model, const Matrix<double>& sample, PredictKind predictor, const Matrix<double>& grid) {
    if (predictor == PredictKind::representative) return predict_nearest_representative(model, grid);
    const KdTree index(sample);
    std::vector<Label> labels(sample.rows(), kNoLabel);
    for (std::size_t j = 0; j < model.cases.size(); ++j) labels[model.cases[j]] = model.assignment.labels[j];
    return predict_1nn(index, labels, model.k, grid);
}

}  // namespace

std::vector<double> simulate_null_agreement(const NullSimConfig& cfg) {
    if (cfg.draws < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 null draws are required");
    if (cfg.mean.size() != cfg.covariance.rows()) throw Error(ErrorCode::LengthMismatch, "mean and covariance differ in dimension");
    if (cfg.n < cfg.k) throw Error(ErrorCode::InvalidArgument, "null sample size must be at least k");
    const Matrix<double> lower = cholesky_factor(cfg.covariance);

    std::vector<Matrix<double>> samples(cfg.draws);
    std::vector<FittedBaseModel> models(cfg.draws);
    parallel_for(cfg.draws, cfg.threads, [&](std::size_t d) {
        Rng rng(derive_seed(cfg.seed, {11, d}));
        samples[d] = draw_normal(cfg.mean, lower, cfg.n, rng);
        const auto learner = make_learner(cfg.base);
        const auto all = iota_indices(cfg.n);
        Rng learner_rng(derive_seed(cfg.seed, {12, d}));
        models[d] = learner->fit(samples[d], all, cfg.k, learner_rng);
    });
    std::vector<double> out(cfg.draws - 1);
    parallel_for(cfg.draws - 1, cfg.threads, [&](std::size_t d) {
        Rng rng(derive_seed(cfg.seed, {13, d}));
        const Matrix<double> grid = draw_normal(cfg.mean, lower, cfg.n, rng);
        const CrispAssignment first = predict_onto(models[d], samples[d], cfg.predictor, grid);
        const CrispAssignment second = predict_onto(models[d + 1], samples[d + 1], cfg.predictor, grid);
        out[d] = rand_between(first, second);
    });
    return out;
}

std::vector<CrispAssignment> resample_solutions(const MmccContext& context, const MmccConfig& cfg, std::size_t draws) {
    std::vector<CrispAssignment> out(draws);
    parallel_for(draws, cfg.threads, [&](std::size_t r) {
        RoundOutcome outcome = resample_round(context, cfg, r);
        if (outcome.degenerate) {
            // Keep the sequence aligned with round indices; a degenerate
            // round contributes its first attempt's fit, possibly with empty clusters.
            Rng rng(derive_seed(cfg.seed, {1, r, 0}));
            const auto resample = draw_resample(context.data().rows(), cfg.resample_size ? cfg.resample_size : context.data().rows(), cfg.scheme, rng);
            Rng learner_rng(derive_seed(cfg.seed, {2, cfg.k, r, 0}));
            const FittedBaseModel model = make_learner(cfg.base, context.distances())->fit(context.data(), resample.indices, cfg.k, learner_rng);
            outcome.assignment = complete_assignment(model, context.data(), cfg.predictor, context.index());
        }
        out[r] = std::move(outcome.assignment);
    });
    return out;
}

std::vector<double> resample_pair_agreement(const MmccContext& context, const MmccConfig& cfg, std::size_t draws) {
    if (draws < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 resample solutions are required");
    const auto solutions = resample_solutions(context, cfg, draws);
    std::vector<double> out(draws - 1);
    for (std::size_t r = 0; r + 1 < draws; ++r) out[r] = rand_between(solutions[r], solutions[r + 1]);
    return out;
}

std::vector<double> reference_agreement(const MmccContext& context, const MmccConfig& cfg, std::size_t draws, const CrispAssignment& reference) {
    if (reference.size() != context.data().rows()) throw Error(ErrorCode::LengthMismatch, "reference must cover every case");
    const auto solutions = resample_solutions(context, cfg, draws);
    std::vector<double> out(draws);
    for (std::size_t r = 0; r < draws; ++r) out[r] = rand_between(solutions[r], reference);
    return out;
}

ConvergenceStudy convergence_study(const MmccContext& context, const MmccConfig& cfg, std::size_t k_min, std::size_t k_max,
                                   std::size_t repetitions) {
    if (repetitions < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 repetitions are required");
    if (k_min < 1 || k_min > k_max) throw Error(ErrorCode::InvalidArgument, "invalid k range");
    ConvergenceStudy study;
    for (std::size_t k = k_min; k <= k_max; ++k) study.ks.push_back(k);
    const std::size_t rounds = cfg.resamples;
    study.fraction = Matrix<double>(rounds, study.ks.size(), 0.0);
    study.final_choice.assign(repetitions, 0);

    const std::size_t jobs = repetitions * study.ks.size();
    std::vector<std::vector<double>> traces(jobs);
    std::vector<bool> degenerate(jobs, false);
    study.final_information = Matrix<double>(repetitions, study.ks.size(), 0.0);
    study.final_uncertainty = Matrix<double>(repetitions, study.ks.size(), 0.0);
    study.final_cic = Matrix<double>(repetitions, study.ks.size(), 0.0);
    parallel_for(jobs, cfg.threads, [&](std::size_t job) {
        MmccConfig run = cfg;
        run.k = study.ks[job % study.ks.size()];
        run.seed = derive_seed(cfg.seed, {21, job / study.ks.size()});
        run.track_cic = true;
        run.early_stop = false;
        run.threads = 1;
        MmccResult result = mmcc_fit(context, run);
        degenerate[job] = run.k > 1 && is_degenerate_model(result, run.k);
        const cic::CicBreakdown b = cic::evaluate(result.probs);
        const std::size_t rep = job / study.ks.size(), j = job % study.ks.size();
        study.final_information(rep, j) = b.information;
        study.final_uncertainty(rep, j) = b.uncertainty;
        study.final_cic(rep, j) = b.cic;
        traces[job] = std::move(result.cic_trace);
    });

    const double share = 1.0 / static_cast<double>(repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        for (std::size_t r = 0; r < rounds; ++r) {
            std::size_t best = study.ks.size();
            double best_value = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < study.ks.size(); ++j) {
                const std::size_t job = rep * study.ks.size() + j;
                if (degenerate[job] || r >= traces[job].size()) continue;
                const double v = traces[job][r];
                if (!std::isnan(v) && v > best_value) {
                    best_value = v;
                    best = j;
                }
            }
            if (best < study.ks.size()) {
                study.fraction(r, best) += share;
                if (r + 1 == rounds) study.final_choice[rep] = study.ks[best];
            }
        }
    }
    return study;
}

DistributionSummary summarize(std::span<const double> values) {
    DistributionSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    return s;
}

}  // namespace truecluster
