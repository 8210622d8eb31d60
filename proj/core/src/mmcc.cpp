#include "truecluster/mmcc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "truecluster/cic.hpp"
#include "truecluster/error.hpp"
#include "truecluster/parallel.hpp"

namespace truecluster {

namespace {

// Stream tags for derive_seed paths.
constexpr std::uint64_t kResampleStream = 1;
constexpr std::uint64_t kLearnerStream = 2;
constexpr std::uint64_t kTieStream = 3;

// Above this size the N x N distance table is not materialised.
constexpr std::size_t kMaxCachedCases = 4000;

Rng tie_rng(const MmccConfig& cfg, std::size_t round) {
    return Rng(derive_seed(cfg.seed, {kTieStream, cfg.k, round}));
}

}  // namespace

void MmccConfig::validate() const {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    if (resamples < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 resamples are required");
    if (early_stop && window < 1) throw Error(ErrorCode::InvalidArgument, "convergence window must be at least 1");
    if (early_stop && !(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "convergence epsilon must be positive");
}

MmccContext::MmccContext(Matrix<double> data, BaseKind base, PredictKind predictor) : data_(std::move(data)) {
    if (base != BaseKind::kmeans && data_.rows() <= kMaxCachedCases) distances_.emplace(data_);
    if (predictor == PredictKind::nearest_neighbor) index_.emplace(data_);
}

RoundOutcome resample_round(const MmccContext& context, const MmccConfig& cfg, std::size_t round, std::span<const std::size_t> pool) {
    const Matrix<double>& data = context.data();
    const std::size_t pool_size = pool.empty() ? data.rows() : pool.size();
    const std::size_t n = cfg.resample_size ? cfg.resample_size : pool_size;
    const auto learner = make_learner(cfg.base, context.distances());

    RoundOutcome out;
    for (std::size_t attempt = 0; attempt <= cfg.degenerate_retry_limit; ++attempt) {
        // The resample stream does not depend on k: every K sees the same draws.
        Rng resample_rng(derive_seed(cfg.seed, {kResampleStream, round, attempt}));
        ResampleIndices resample = draw_resample(pool_size, n, cfg.scheme, resample_rng);
        if (!pool.empty())
            for (auto& idx : resample.indices) idx = pool[idx];

        Rng learner_rng(derive_seed(cfg.seed, {kLearnerStream, cfg.k, round, attempt}));
        const FittedBaseModel model = learner->fit(data, resample.indices, cfg.k, learner_rng);
        if (model.degenerate) continue;
        out.assignment = complete_assignment(model, data, cfg.predictor, context.index(), pool);
        // Prediction can still empty a cluster when representatives coincide.
        if (out.assignment.occupied() < cfg.k) continue;
        out.degenerate = false;
        return out;
    }
    out.degenerate = true;
    return out;
}

namespace {

// Sequential aggregator shared by the standard and batched paths. `pool_of`
// returns the cases a round resamples from and votes for (empty = all).
template <typename PoolOf>
MmccResult aggregate(const MmccContext& context, const MmccConfig& cfg, PoolOf&& pool_of) {
    const std::size_t n = context.data().rows();
    MmccResult result;
    result.votes = VoteMatrix(n, cfg.k);
    CrispAssignment previous_majority;
    std::size_t rounds_since_change = 0;
    double last_cic = std::numeric_limits<double>::quiet_NaN();
    std::vector<bool> voted(n, false);
    std::size_t unvoted = n;
    auto mark_voted = [&](std::span<const std::size_t> pool) {
        if (unvoted == 0) return;
        if (pool.empty()) {
            std::fill(voted.begin(), voted.end(), true);
            unvoted = 0;
            return;
        }
        for (const std::size_t i : pool)
            if (!voted[i]) {
                voted[i] = true;
                --unvoted;
            }
    };

    const std::size_t block = std::max<std::size_t>(1, cfg.threads) * 4;
    std::vector<RoundOutcome> outcomes;
    bool stop = false;
    for (std::size_t start = 0; start < cfg.resamples && !stop; start += block) {
        const std::size_t count = std::min(block, cfg.resamples - start);
        outcomes.assign(count, RoundOutcome{});
        parallel_for(count, cfg.threads, [&](std::size_t j) { outcomes[j] = resample_round(context, cfg, start + j, pool_of(start + j)); });

        for (std::size_t j = 0; j < count && !stop; ++j) {
            const std::size_t round = start + j;
            const std::span<const std::size_t> pool = pool_of(round);
            ++result.rounds_used;
            RoundOutcome& outcome = outcomes[j];
            if (outcome.degenerate) {
                ++result.degenerate_rounds;
                ++rounds_since_change;
            } else if (result.votes.total_resamples() == 0) {
                // First vote is unmatched: no reference exists yet.
                if (pool.empty()) {
                    result.votes.vote(outcome.assignment);
                } else {
                    std::vector<Label> labels(pool.size());
                    for (std::size_t p = 0; p < pool.size(); ++p) labels[p] = outcome.assignment.labels[pool[p]];
                    result.votes.vote(pool, labels);
                }
            } else {
                Rng ties = tie_rng(cfg, round);
                Permutation perm;
                CrispAssignment majority{std::vector<Label>(n, kNoLabel), cfg.k};
                if (pool.empty()) {
                    majority = majority_estimate(result.votes, ties);
                    perm = align_labels(contingency(outcome.assignment, majority), cfg.matcher, cfg.exact_matching_bound);
                } else {
                    std::vector<std::size_t> overlap;
                    for (const std::size_t i : pool) {
                        majority.labels[i] = majority_label(result.votes.counts().row(i), ties);
                        if (majority.labels[i] != kNoLabel) overlap.push_back(i);
                    }
                    perm = align_labels(contingency(outcome.assignment, majority, overlap), cfg.matcher, cfg.exact_matching_bound);
                }
                if (majority == previous_majority) {
                    ++rounds_since_change;
                } else {
                    rounds_since_change = 1;
                    previous_majority = std::move(majority);
                }
                if (pool.empty()) {
                    result.votes.vote(apply_permutation(outcome.assignment, perm));
                } else {
                    std::vector<Label> labels(pool.size());
                    for (std::size_t p = 0; p < pool.size(); ++p) labels[p] = perm[outcome.assignment.labels[pool[p]]];
                    result.votes.vote(pool, labels);
                }
            }
            if (!outcome.degenerate) mark_voted(pool);
            if (cfg.track_cic || cfg.early_stop) {
                if (!outcome.degenerate && unvoted == 0) last_cic = cic::score(result.votes);
                result.cic_trace.push_back(last_cic);
            }
            if (cfg.early_stop && check_convergence(result.cic_trace, cfg.window, cfg.epsilon, rounds_since_change)) stop = true;
        }
    }
    if (result.votes.total_resamples() == 0)
        throw Error(ErrorCode::AllRoundsDegenerate, "every resample degenerated for k=" + std::to_string(cfg.k));
    result.probs = normalize_votes(result.votes);
    Rng ties = tie_rng(cfg, cfg.resamples);
    result.majority = majority_estimate(result.votes, ties);
    if (!cfg.track_cic) result.cic_trace.clear();
    return result;
}

}  // namespace

MmccResult mmcc_fit(const MmccContext& context, const MmccConfig& cfg) {
    cfg.validate();
    const std::size_t n = context.data().rows();
    if (cfg.k == 1) {
        MmccResult result;
        Matrix<std::uint32_t> counts(n, 1, static_cast<std::uint32_t>(cfg.resamples));
        result.votes = VoteMatrix(std::move(counts), cfg.resamples);
        result.probs = normalize_votes(result.votes);
        result.rounds_used = cfg.resamples;
        if (cfg.track_cic) result.cic_trace.assign(cfg.resamples, 0.0);
        result.majority = CrispAssignment{std::vector<Label>(n, 0), 1};
        return result;
    }
    return aggregate(context, cfg, [](std::size_t) { return std::span<const std::size_t>{}; });
}

MmccResult mmcc_fit(const Dataset& data, const MmccConfig& cfg) {
    const MmccContext context(data.values(), cfg.base, cfg.predictor);
    return mmcc_fit(context, cfg);
}

MmccResult mmcc_fit_batched(const MmccContext& context, const MmccConfig& cfg, const std::vector<std::vector<std::size_t>>& batches,
                            double overlap_fraction) {
    cfg.validate();
    if (cfg.k < 2) throw Error(ErrorCode::InvalidArgument, "the batched path needs k >= 2");
    const std::size_t n = context.data().rows();
    if (batches.empty()) throw Error(ErrorCode::InvalidArgument, "no batches given");
    if (cfg.resamples < batches.size()) throw Error(ErrorCode::InvalidArgument, "fewer resamples than batches leaves cases unvoted");

    std::vector<bool> covered(n, false);
    for (const auto& batch : batches) {
        if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "empty batch");
        for (const std::size_t i : batch) {
            if (i >= n) throw Error(ErrorCode::InvalidArgument, "batch index out of range", i);
            covered[i] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!covered[i]) throw Error(ErrorCode::UncoveredCase, "case " + std::to_string(i + 1) + " is in no batch", i);

    for (std::size_t b = 0; b + 1 < batches.size(); ++b) {
        std::vector<std::size_t> a(batches[b]), c(batches[b + 1]);
        std::sort(a.begin(), a.end());
        std::sort(c.begin(), c.end());
        std::vector<std::size_t> shared;
        std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(shared));
        const double needed = overlap_fraction * static_cast<double>(std::min(a.size(), c.size()));
        if (static_cast<double>(shared.size()) + 1e-9 < needed)
            throw Error(ErrorCode::InsufficientOverlap, "batches " + std::to_string(b + 1) + " and " + std::to_string(b + 2) + " overlap too little", b);
    }
    return aggregate(context, cfg,
                     [&](std::size_t round) { return std::span<const std::size_t>(batches[round % batches.size()]); });
}

std::vector<std::vector<std::size_t>> make_overlapping_batches(std::size_t n_cases, std::size_t batch_size, double overlap_fraction) {
    if (batch_size == 0 || batch_size > n_cases) throw Error(ErrorCode::InvalidArgument, "batch size must be in 1..N");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) throw Error(ErrorCode::InvalidArgument, "overlap fraction must be in [0,1)");
    const auto overlap = static_cast<std::size_t>(std::ceil(overlap_fraction * static_cast<double>(batch_size)));
    const std::size_t step = std::max<std::size_t>(1, batch_size - overlap);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0;; start += step) {
        const std::size_t first = std::min(start, n_cases - batch_size);
        std::vector<std::size_t> batch(batch_size);
        std::iota(batch.begin(), batch.end(), first);
        batches.push_back(std::move(batch));
        if (first + batch_size >= n_cases) break;
    }
    return batches;
}

bool is_degenerate_model(const MmccResult& result, std::size_t k) {
    if (result.rounds_used > 0 &&
        static_cast<double>(result.degenerate_rounds) > kDegenerateRoundFraction * static_cast<double>(result.rounds_used))
        return true;
    return result.majority.occupied() < k;
}

bool check_convergence(std::span<const double> cic_trace, std::size_t window, double epsilon, std::size_t rounds_since_majority_change) {
    if (window == 0 || cic_trace.size() < window) return false;
    if (rounds_since_majority_change < window) return false;
    const auto tail = cic_trace.last(window);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (std::isnan(*lo) || std::isnan(*hi)) return false;
    for (const double v : tail)
        if (std::isnan(v)) return false;
    return *hi - *lo < epsilon;
}

}  // namespace truecluster
