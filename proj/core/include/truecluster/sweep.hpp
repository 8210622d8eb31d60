#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "truecluster/cic.hpp"
#include "truecluster/mmcc.hpp"

namespace truecluster {

struct SweepConfig {
    std::size_t k_min = 2;
    std::size_t k_max = 10;
    /// Shared by every K; its `k` and `threads` fields are ignored.
    MmccConfig mmcc;
    std::size_t threads = 1;
    bool silhouette = true;
};

struct SweepModel {
    std::size_t k = 0;
    /// Absent when every round degenerated.
    std::optional<MmccResult> result;
    cic::CicBreakdown breakdown;
    double degenerate_fraction = 0.0;
    bool degenerate = false;
    /// Mean silhouette of the full-sample base solution (K >= 2).
    std::optional<double> silhouette;
};

enum class SweepStatus { selected, all_degenerate };

struct SweepReport {
    std::vector<SweepModel> models;
    SweepStatus status = SweepStatus::selected;
    /// argmax CIC over non-degenerate K >= 2 (K = 1 when it is the only
    /// candidate); absent when all are degenerate.
    std::optional<std::size_t> selected_k;
};

/// Full-sample base solution for one K (the "standard" solution).
CrispAssignment standard_solution(const MmccContext& context, const MmccConfig& cfg);

/// Mean silhouette width of standard_solution for each K in [k_min, k_max].
std::vector<double> silhouette_baseline(const MmccContext& context, const MmccConfig& cfg, std::size_t k_min, std::size_t k_max,
                                        std::size_t threads = 1);

/// Fits every K (in parallel; results do not depend on `threads`),
/// evaluates the CIC and selects the model.
SweepReport run_sweep(const MmccContext& context, const SweepConfig& cfg);

}  // namespace truecluster
