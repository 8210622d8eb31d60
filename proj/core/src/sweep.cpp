#include "truecluster/sweep.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "truecluster/baselearn.hpp"
#include "truecluster/error.hpp"
#include "truecluster/parallel.hpp"

namespace truecluster {

namespace {

// Seed stream of the full-sample standard fit.
constexpr std::uint64_t kStandardStream = 4;

}  // namespace

CrispAssignment standard_solution(const MmccContext& context, const MmccConfig& cfg) {
    const std::size_t n = context.data().rows();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {kStandardStream, cfg.k}));
    const FittedBaseModel model = make_learner(cfg.base, context.distances())->fit(context.data(), all, cfg.k, rng);
    return complete_assignment(model, context.data(), cfg.predictor, context.index());
}

std::vector<double> silhouette_baseline(const MmccContext& context, const MmccConfig& cfg, std::size_t k_min, std::size_t k_max,
                                        std::size_t threads) {
    if (k_min < 2 || k_min > k_max) throw Error(ErrorCode::InvalidArgument, "silhouette needs 2 <= kmin <= kmax");
    std::optional<PairwiseDistances> own;
    const PairwiseDistances* distances = context.distances();
    if (!distances) distances = &own.emplace(context.data());
    std::vector<double> out(k_max - k_min + 1);
    parallel_for(out.size(), threads, [&](std::size_t j) {
        MmccConfig one = cfg;
        one.k = k_min + j;
        out[j] = mean_silhouette(*distances, standard_solution(context, one));
    });
    return out;
}

SweepReport run_sweep(const MmccContext& context, const SweepConfig& cfg) {
    if (cfg.k_min < 1 || cfg.k_min > cfg.k_max) throw Error(ErrorCode::InvalidArgument, "need 1 <= kmin <= kmax");
    if (cfg.k_max > context.data().rows()) throw Error(ErrorCode::InvalidArgument, "kmax exceeds the number of cases");
    const std::size_t count = cfg.k_max - cfg.k_min + 1;
    SweepReport report;
    report.models.resize(count);

    // Workers go to K first; spare workers speed up the rounds within each K.
    const std::size_t outer = std::max<std::size_t>(1, std::min(cfg.threads, count));
    const std::size_t inner = std::max<std::size_t>(1, cfg.threads / outer);
    parallel_for(count, outer, [&](std::size_t j) {
        SweepModel& model = report.models[j];
        model.k = cfg.k_min + j;
        MmccConfig one = cfg.mmcc;
        one.k = model.k;
        one.threads = inner;
        try {
            model.result = mmcc_fit(context, one);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::AllRoundsDegenerate) throw;
            model.degenerate = true;
            model.degenerate_fraction = 1.0;
            return;
        }
        const MmccResult& r = *model.result;
        model.breakdown = cic::evaluate(r.probs);
        model.degenerate_fraction = r.rounds_used ? static_cast<double>(r.degenerate_rounds) / static_cast<double>(r.rounds_used) : 0.0;
        model.degenerate = model.k > 1 && is_degenerate_model(r, model.k);
    });

    if (cfg.silhouette && cfg.k_max >= 2) {
        const std::size_t lo = std::max<std::size_t>(2, cfg.k_min);
        const auto widths = silhouette_baseline(context, cfg.mmcc, lo, cfg.k_max, cfg.threads);
        for (std::size_t j = 0; j < widths.size(); ++j) report.models[lo - cfg.k_min + j].silhouette = widths[j];
    }

    double best = -std::numeric_limits<double>::infinity();
    for (const SweepModel& m : report.models) {
        if (m.k < 2 || m.degenerate) continue;
        if (m.breakdown.cic > best) {
            best = m.breakdown.cic;
            report.selected_k = m.k;
        }
    }
    if (!report.selected_k) {
        if (cfg.k_max < 2)
            report.selected_k = 1;
        else
            report.status = SweepStatus::all_degenerate;
    }
    return report;
}

}  // namespace truecluster
