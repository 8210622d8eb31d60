#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "truecluster/matrix.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

/// counts(a, b): cases labelled a in the candidate and b in the reference.
using ContingencyTable = Matrix<std::int64_t>;

/// Label permutation: perm[candidate_label] = reference_label.
using Permutation = std::vector<Label>;

enum class MatcherKind { exact, heuristic };

std::string_view to_string(MatcherKind kind) noexcept;

inline constexpr std::size_t kDefaultExactMatchingBound = 12;

/// Cross-tabulation of two assignments declaring the same k.
ContingencyTable contingency(const CrispAssignment& candidate, const CrispAssignment& reference);

/// Cross-tabulation restricted to the listed cases.
ContingencyTable contingency(const CrispAssignment& candidate, const CrispAssignment& reference, std::span<const std::size_t> cases);

/// Rectangular cross-tabulation of label vectors with their own label counts.
ContingencyTable cross_tabulate(std::span<const Label> a, std::size_t ka, std::span<const Label> b, std::size_t kb);

/// Sum of table(a, perm[a]).
std::int64_t trace_objective(const ContingencyTable& table, const Permutation& perm);

/// Maximum-trace assignment of a square table (Hungarian algorithm); the
/// lexicographically smallest permutation among optimal ones.
Permutation max_trace_assignment(const ContingencyTable& table);

/// Largest-remaining-cell greedy pairing; ties to lowest row then column.
Permutation greedy_assignment(const ContingencyTable& table);

/// Exact alignment of candidate labels onto reference labels. Throws
/// KTooLarge when k exceeds `bound`.
Permutation align_labels_exact(const CrispAssignment& candidate, const CrispAssignment& reference,
                               std::size_t bound = kDefaultExactMatchingBound);

Permutation align_labels_heuristic(const CrispAssignment& candidate, const CrispAssignment& reference);

/// Dispatches on `kind`; the exact matcher falls back to the heuristic above
/// the bound.
Permutation align_labels(const ContingencyTable& table, MatcherKind kind, std::size_t bound = kDefaultExactMatchingBound);

/// Maps every label through perm. Throws NotAPermutation unless perm is a
/// bijection on [0, k).
CrispAssignment apply_permutation(const CrispAssignment& assignment, const Permutation& perm);

bool is_permutation(const Permutation& perm);
Permutation inverse(const Permutation& perm);
/// (outer ∘ inner)[l] = outer[inner[l]].
Permutation compose(const Permutation& outer, const Permutation& inner);

}  // namespace truecluster
