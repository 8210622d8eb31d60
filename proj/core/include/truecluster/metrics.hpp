#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "truecluster/matrix.hpp"
#include "truecluster/mmcc.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

/// External agreement between two partitions of the same cases.
/// fraction_matched and kappa are computed after optimal label matching.
struct AgreementReport {
    double fraction_matched = 0.0;
    double kappa = 0.0;
    double rand = 0.0;
    double crand = 0.0;
};

/// Pair counts over all unordered case pairs.
struct PairCounts {
    std::int64_t same_same = 0;  ///< together in both
    std::int64_t same_diff = 0;  ///< together in a only
    std::int64_t diff_same = 0;  ///< together in b only
    std::int64_t diff_diff = 0;  ///< apart in both
    std::int64_t total() const noexcept { return same_same + same_diff + diff_same + diff_diff; }
};

PairCounts pair_counts(const CrispAssignment& a, const CrispAssignment& b);
double rand_index(const CrispAssignment& a, const CrispAssignment& b);
/// Hubert-Arabie adjusted Rand index. Identical trivial partitions give 1.
double adjusted_rand_index(const CrispAssignment& a, const CrispAssignment& b);

/// Agreement of `a` with `b`; the label sets may differ in size.
AgreementReport agreement(const CrispAssignment& a, const CrispAssignment& b);

/// Relabels `solution` onto `reference` labels by maximum-trace matching
/// (the smaller label set is padded with empty clusters).
CrispAssignment match_to_reference(const CrispAssignment& solution, const CrispAssignment& reference);

/// Per-case failure codes for two methods scored against the truth:
/// 'o' both correct, 's' only `standard` fails, 't' only `solution` fails,
/// 'x' both fail.
std::string failure_codes(const CrispAssignment& truth, const CrispAssignment& solution, const CrispAssignment& standard);

/// Multivariate normal reference for null-distribution simulation.
struct NullSimConfig {
    std::vector<double> mean;
    Matrix<double> covariance;
    /// Successive samples drawn; draws - 1 agreement values result.
    std::size_t draws = 1001;
    std::size_t n = 100;
    std::size_t k = 4;
    BaseKind base = BaseKind::pam;
    PredictKind predictor = PredictKind::representative;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

/// Sample mean and (N-1)-normalised covariance of the rows.
NullSimConfig null_reference_from(const Matrix<double>& data);

/// Rand agreement of base solutions fitted to successive independent null
/// samples. Both fitted models are predicted onto a fresh grid of n null
/// draws per pair, so each value compares labellings of the same points.
std::vector<double> simulate_null_agreement(const NullSimConfig& cfg);

/// Full-length solutions of `draws` successive resample rounds (fit on the
/// resample, predict the rest) under `cfg`'s scheme, learner and seed.
std::vector<CrispAssignment> resample_solutions(const MmccContext& context, const MmccConfig& cfg, std::size_t draws);

/// Rand agreement between successive resample solutions (draws - 1 values).
std::vector<double> resample_pair_agreement(const MmccContext& context, const MmccConfig& cfg, std::size_t draws);

/// Rand agreement between each resample solution and a fixed reference.
std::vector<double> reference_agreement(const MmccContext& context, const MmccConfig& cfg, std::size_t draws,
                                        const CrispAssignment& reference);

/// Running CIC model choice across repeated sweeps.
struct ConvergenceStudy {
    std::vector<std::size_t> ks;
    /// fraction(r, j): share of repetitions whose CIC argmax after round r+1
    /// is ks[j].
    Matrix<double> fraction;
    /// Final choice of each repetition.
    std::vector<std::size_t> final_choice;
    /// Final scores per (repetition, ks[j]).
    Matrix<double> final_information;
    Matrix<double> final_uncertainty;
    Matrix<double> final_cic;
};

/// Repeats the K sweep `repetitions` times with seeds derived from
/// `cfg.seed`; `cfg.k` is ignored.
ConvergenceStudy convergence_study(const MmccContext& context, const MmccConfig& cfg, std::size_t k_min, std::size_t k_max,
                                   std::size_t repetitions);

/// Summary statistics of a distribution (linear-interpolated quartiles).
struct DistributionSummary {
    std::size_t count = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double mean = 0.0;
};
DistributionSummary summarize(std::span<const double> values);

}  // namespace truecluster
