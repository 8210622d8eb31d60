#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "truecluster/baselearn.hpp"
#include "truecluster/kdtree.hpp"
#include "truecluster/matching.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

struct MmccConfig {
    std::size_t k = 2;
    /// Total voting rounds R (>= 2).
    std::size_t resamples = 1000;
    /// Resample size n; 0 means N.
    std::size_t resample_size = 0;
    ResampleScheme scheme = ResampleScheme::bootstrap;
    BaseKind base = BaseKind::pam;
    PredictKind predictor = PredictKind::representative;
    MatcherKind matcher = MatcherKind::exact;
    std::size_t exact_matching_bound = kDefaultExactMatchingBound;
    std::uint64_t seed = 1;
    std::size_t degenerate_retry_limit = 3;
    /// Opt-in early stopping; otherwise exactly `resamples` rounds run.
    bool early_stop = false;
    std::size_t window = 100;
    double epsilon = 0.005;
    /// Workers computing base fits ahead of the (sequential) vote aggregator.
    std::size_t threads = 1;
    /// Record the CIC after every round.
    bool track_cic = true;

    /// Throws InvalidArgument on out-of-range settings.
    void validate() const;
};

struct MmccResult {
    VoteMatrix votes;
    ProbabilityMatrix probs;
    /// Rounds whose base fit stayed degenerate after all retries (no vote).
    std::size_t degenerate_rounds = 0;
    /// Rounds attempted, voting or skipped.
    std::size_t rounds_used = 0;
    /// CIC after each attempted round (skipped rounds repeat the previous
    /// value; NaN before the first vote).
    std::vector<double> cic_trace;
    /// Final majority estimate (ties broken with the run's seed).
    CrispAssignment majority;
};

/// Per-dataset state shared by every K and round: the data, a distance
/// table for medoid/linkage learners and a kd-tree for 1-NN prediction.
class MmccContext {
  public:
    MmccContext(Matrix<double> data, BaseKind base, PredictKind predictor);

    const Matrix<double>& data() const noexcept { return data_; }
    const PairwiseDistances* distances() const noexcept { return distances_ ? &*distances_ : nullptr; }
    const KdTree* index() const noexcept { return index_ ? &*index_ : nullptr; }

  private:
    Matrix<double> data_;
    std::optional<PairwiseDistances> distances_;
    std::optional<KdTree> index_;
};

/// One resample round: draw, fit (retrying degenerate fits with fresh
/// seeds), and complete the assignment over `target` cases (all when
/// empty). Pure in (context, cfg, round).
struct RoundOutcome {
    CrispAssignment assignment;
    bool degenerate = false;
};
RoundOutcome resample_round(const MmccContext& context, const MmccConfig& cfg, std::size_t round,
                            std::span<const std::size_t> pool = {});

/// Share of skipped rounds above which a fitted model counts as degenerate.
inline constexpr double kDegenerateRoundFraction = 0.10;

/// Model-level degeneration: more than 10% of rounds skipped, or a final
/// majority estimate occupying fewer than k clusters.
bool is_degenerate_model(const MmccResult& result, std::size_t k);

/// Standard multiple-match cluster-count aggregation.
MmccResult mmcc_fit(const MmccContext& context, const MmccConfig& cfg);
MmccResult mmcc_fit(const Dataset& data, const MmccConfig& cfg);

/// Batched variant: round r resamples within batches[r % B] and votes only
/// for that batch's cases, aligned on cases already voted on.
MmccResult mmcc_fit_batched(const MmccContext& context, const MmccConfig& cfg, const std::vector<std::vector<std::size_t>>& batches,
                            double overlap_fraction = 0.5);

/// Consecutive windows over [0, n_cases) of `batch_size` cases sharing
/// `overlap_fraction` of their cases with the next window.
std::vector<std::vector<std::size_t>> make_overlapping_batches(std::size_t n_cases, std::size_t batch_size, double overlap_fraction = 0.5);

/// True iff the last `window` trace values span less than `epsilon` and the
/// majority assignment has not changed for at least `window` rounds.
bool check_convergence(std::span<const double> cic_trace, std::size_t window, double epsilon,
                       std::size_t rounds_since_majority_change = std::numeric_limits<std::size_t>::max());

}  // namespace truecluster
