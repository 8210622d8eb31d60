#include "truecluster/cic.hpp"

#include <cassert>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "truecluster/error.hpp"

namespace truecluster::cic {

namespace {

inline double plogp(double p) noexcept { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Contribution of one cell to the CIC: I[i,k] + P log2 P.
inline double cell_cic(double p, double marginal, double keep) noexcept {
    if (p <= 0.0) return 0.0;
    const double agreement = 1.0 - std::abs(p - marginal);
    assert(agreement > 0.0);
    return -p * std::log2(agreement) * keep + p * std::log2(p);
}

template <typename RowAccess>
double score_rows(std::size_t n, std::size_t k, RowAccess&& row_prob) {
    if (k <= 1) return 0.0;
    std::vector<double> marginal(k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) marginal[c] += row_prob(i, c);
    const double total = std::accumulate(marginal.begin(), marginal.end(), 0.0);
    for (auto& m : marginal) m /= total;
    const double keep = 1.0 - relative_model_complexity(marginal, n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) sum += cell_cic(row_prob(i, c), marginal[c], keep);
    return sum / static_cast<double>(n);
}

}  // namespace

double entropy(std::span<const double> p) {
    double total = 0.0;
    for (const double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::NotADistribution, "probability outside [0,1]");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::NotADistribution, "probabilities do not sum to 1");
    double h = 0.0;
    for (const double v : p) h -= plogp(v);
    return h;
}

double pseudo_log2_likelihood(const ProbabilityMatrix& probs) {
    double ll = 0.0;
    for (std::size_t i = 0; i < probs.cases(); ++i) {
        const auto row = probs.row(i);
        double best = row[0];
        for (const double v : row) best = std::max(best, v);
        if (best <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += std::log2(best);
    }
    return ll;
}

double model_uncertainty(const ProbabilityMatrix& probs) {
    double s = 0.0;
    for (std::size_t i = 0; i < probs.cases(); ++i)
        for (const double v : probs.row(i)) s -= plogp(v);
    return s / static_cast<double>(probs.cases());
}

std::vector<double> cluster_probabilities(const ProbabilityMatrix& probs) {
    std::vector<double> p(probs.k(), 0.0);
    for (std::size_t i = 0; i < probs.cases(); ++i)
        for (std::size_t c = 0; c < probs.k(); ++c) p[c] += probs(i, c);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= total;
    return p;
}

Matrix<double> weighted_log_deviation(const ProbabilityMatrix& probs, std::span<const double> cluster_probs) {
    if (cluster_probs.size() != probs.k()) throw Error(ErrorCode::LengthMismatch, "one cluster probability per column is required");
    Matrix<double> d(probs.cases(), probs.k(), 0.0);
    for (std::size_t i = 0; i < probs.cases(); ++i)
        for (std::size_t c = 0; c < probs.k(); ++c) {
            const double p = probs(i, c);
            if (p <= 0.0) continue;
            const double agreement = 1.0 - std::abs(p - cluster_probs[c]);
            assert(agreement > 0.0);
            d(i, c) = -p * std::log2(agreement);
        }
    return d;
}

double relative_model_complexity(std::span<const double> cluster_probs, std::size_t n_cases) {
    if (n_cases < 2) throw Error(ErrorCode::InvalidArgument, "relative model complexity needs at least 2 cases");
    const double h = entropy(cluster_probs);
    return (std::exp2(h) - 1.0) / static_cast<double>(n_cases - 1);
}

ModelInformation model_information(const Matrix<double>& deviation, double rmc) {
    ModelInformation out{0.0, Matrix<double>(deviation.rows(), deviation.cols(), 0.0)};
    const double keep = 1.0 - rmc;
    double s = 0.0;
    for (std::size_t i = 0; i < deviation.rows(); ++i)
        for (std::size_t c = 0; c < deviation.cols(); ++c) {
            out.cell_information(i, c) = deviation(i, c) * keep;
            s += out.cell_information(i, c);
        }
    out.information = deviation.rows() ? s / static_cast<double>(deviation.rows()) : 0.0;
    return out;
}

std::vector<double> gsd(const ProbabilityMatrix& probs) {
    if (probs.k() < 2) throw Error(ErrorCode::KTooSmall, "GSD needs at least 2 clusters");
    std::vector<double> out(probs.cases());
    for (std::size_t i = 0; i < probs.cases(); ++i) {
        double best = -1.0, second = -1.0;
        for (const double v : probs.row(i)) {
            if (v > best) {
                second = best;
                best = v;
            } else if (v > second) {
                second = v;
            }
        }
        out[i] = 2.0 * best / (best + second) - 1.0;
    }
    return out;
}

CicBreakdown evaluate(const ProbabilityMatrix& probs) {
    const std::size_t n = probs.cases();
    const std::size_t k = probs.k();
    CicBreakdown out;
    if (k <= 1) {
        out.cluster_probs.assign(k, 1.0);
        out.deviation = Matrix<double>(n, k, 0.0);
        out.cell_information = Matrix<double>(n, k, 0.0);
        out.cellwise = Matrix<double>(n, k, 0.0);
        return out;
    }
    out.cluster_probs = cluster_probabilities(probs);
    out.entropy_of_marginals = entropy(out.cluster_probs);
    out.uncertainty = model_uncertainty(probs);
    out.deviation = weighted_log_deviation(probs, out.cluster_probs);
    out.rmc = relative_model_complexity(out.cluster_probs, n);
    auto info = model_information(out.deviation, out.rmc);
    out.information = info.information;
    out.cell_information = std::move(info.cell_information);
    out.cic = out.information - out.uncertainty;
    out.cellwise = Matrix<double>(n, k, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) out.cellwise(i, c) = out.cell_information(i, c) + plogp(probs(i, c));
    out.gsd = gsd(probs);
    return out;
}

double score(const ProbabilityMatrix& probs) {
    return score_rows(probs.cases(), probs.k(), [&](std::size_t i, std::size_t c) { return probs(i, c); });
}

double score(const VoteMatrix& votes) {
    const std::size_t n = votes.cases();
    std::vector<double> row_total(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto total = votes.row_sum(i);
        if (total == 0) throw Error(ErrorCode::ZeroRowSum, "case " + std::to_string(i + 1) + " received no votes", i);
        row_total[i] = static_cast<double>(total);
    }
    return score_rows(n, votes.k(),
                      [&](std::size_t i, std::size_t c) { return static_cast<double>(votes.counts()(i, c)) / row_total[i]; });
}

}  // namespace truecluster::cic
