#include "truecluster/matching.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "truecluster/error.hpp"

namespace truecluster {

std::string_view to_string(MatcherKind kind) noexcept {
    return kind == MatcherKind::exact ? "exact" : "heuristic";
}

ContingencyTable cross_tabulate(std::span<const Label> a, std::size_t ka, std::span<const Label> b, std::size_t kb) {
    if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "assignments differ in length");
    ContingencyTable table(ka, kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] >= ka || b[i] >= kb) throw Error(ErrorCode::InvalidArgument, "label out of range", i);
        ++table(a[i], b[i]);
    }
    return table;
}

ContingencyTable contingency(const CrispAssignment& candidate, const CrispAssignment& reference) {
    if (candidate.size() != reference.size()) throw Error(ErrorCode::LengthMismatch, "assignments differ in length");
    if (candidate.k != reference.k) throw Error(ErrorCode::InvalidArgument, "assignments declare different k");
    return cross_tabulate(candidate.labels, candidate.k, reference.labels, reference.k);
}

ContingencyTable contingency(const CrispAssignment& candidate, const CrispAssignment& reference, std::span<const std::size_t> cases) {
    if (candidate.size() != reference.size()) throw Error(ErrorCode::LengthMismatch, "assignments differ in length");
    if (candidate.k != reference.k) throw Error(ErrorCode::InvalidArgument, "assignments declare different k");
    ContingencyTable table(candidate.k, candidate.k, 0);
    for (const std::size_t i : cases) ++table(candidate.labels.at(i), reference.labels.at(i));
    return table;
}

std::int64_t trace_objective(const ContingencyTable& table, const Permutation& perm) {
    std::int64_t s = 0;
    for (std::size_t a = 0; a < perm.size(); ++a) s += table(a, perm[a]);
    return s;
}

namespace {

// Minimum-cost perfect matching of rows[] to cols[] (same length) under
// cost = -table; shortest augmenting paths with potentials. Returns the
// column chosen for each listed row and the achieved trace.
std::pair<std::vector<std::size_t>, std::int64_t> hungarian(const ContingencyTable& table, std::span<const std::size_t> rows,
                                                            std::span<const std::size_t> cols) {
    const std::size_t n = rows.size();
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    auto cost = [&](std::size_t r, std::size_t c) { return -table(rows[r - 1], cols[c - 1]); };
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), way_min(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (std::size_t r = 1; r <= n; ++r) {
        match[0] = r;
        std::size_t c0 = 0;
        std::fill(way_min.begin(), way_min.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[c0] = true;
            const std::size_t r0 = match[c0];
            std::int64_t delta = inf;
            std::size_t c1 = 0;
            for (std::size_t c = 1; c <= n; ++c) {
                if (used[c]) continue;
                const std::int64_t reduced = cost(r0, c) - u[r0] - v[c];
                if (reduced < way_min[c]) {
                    way_min[c] = reduced;
                    way[c] = c0;
                }
                if (way_min[c] < delta) {
                    delta = way_min[c];
                    c1 = c;
                }
            }
            for (std::size_t c = 0; c <= n; ++c) {
                if (used[c]) {
                    u[match[c]] += delta;
                    v[c] -= delta;
                } else {
                    way_min[c] -= delta;
                }
            }
            c0 = c1;
        } while (match[c0] != 0);
        do {
            const std::size_t c1 = way[c0];
            match[c0] = match[c1];
            c0 = c1;
        } while (c0 != 0);
    }
    std::vector<std::size_t> assigned(n);
    std::int64_t total = 0;
    for (std::size_t c = 1; c <= n; ++c) {
        assigned[match[c] - 1] = cols[c - 1];
        total += table(rows[match[c] - 1], cols[c - 1]);
    }
    return {assigned, total};
}

void require_square(const ContingencyTable& table) {
    if (table.rows() != table.cols()) throw Error(ErrorCode::InvalidArgument, "matching needs a square contingency table");
}

}  // namespace

Permutation max_trace_assignment(const ContingencyTable& table) {
    require_square(table);
    const std::size_t k = table.rows();
    Permutation perm(k);
    std::vector<std::size_t> free_cols(k);
    std::iota(free_cols.begin(), free_cols.end(), std::size_t{0});

    // Fix rows in order, each to the smallest column that still admits an
    // optimal completion.
    for (std::size_t r = 0; r < k; ++r) {
        std::vector<std::size_t> rows(k - r);
        std::iota(rows.begin(), rows.end(), r);
        const auto [solution, best] = hungarian(table, rows, free_cols);
        std::size_t chosen = solution[0];
        std::vector<std::size_t> rest_rows(rows.begin() + 1, rows.end());
        for (const std::size_t c : free_cols) {
            if (c >= chosen) break;
            std::vector<std::size_t> rest_cols;
            rest_cols.reserve(free_cols.size() - 1);
            for (const std::size_t other : free_cols)
                if (other != c) rest_cols.push_back(other);
            const std::int64_t completion = rest_rows.empty() ? 0 : hungarian(table, rest_rows, rest_cols).second;
            if (table(r, c) + completion == best) {
                chosen = c;
                break;
            }
        }
        perm[r] = static_cast<Label>(chosen);
        free_cols.erase(std::find(free_cols.begin(), free_cols.end(), chosen));
    }
    return perm;
}

Permutation greedy_assignment(const ContingencyTable& table) {
    require_square(table);
    const std::size_t k = table.rows();
    std::vector<std::tuple<std::int64_t, std::size_t, std::size_t>> cells;
    cells.reserve(k * k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) cells.emplace_back(-table(a, b), a, b);
    std::sort(cells.begin(), cells.end());
    Permutation perm(k, kNoLabel);
    std::vector<bool> col_taken(k, false);
    std::size_t placed = 0;
    for (const auto& [neg, a, b] : cells) {
        if (placed == k) break;
        if (perm[a] != kNoLabel || col_taken[b]) continue;
        perm[a] = static_cast<Label>(b);
        col_taken[b] = true;
        ++placed;
    }
    return perm;
}

Permutation align_labels(const ContingencyTable& table, MatcherKind kind, std::size_t bound) {
    if (kind == MatcherKind::exact && table.rows() <= bound) return max_trace_assignment(table);
    return greedy_assignment(table);
}

Permutation align_labels_exact(const CrispAssignment& candidate, const CrispAssignment& reference, std::size_t bound) {
    if (candidate.k > bound)
        throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(candidate.k) + " exceeds the exact matching bound " + std::to_string(bound));
    return max_trace_assignment(contingency(candidate, reference));
}

Permutation align_labels_heuristic(const CrispAssignment& candidate, const CrispAssignment& reference) {
    return greedy_assignment(contingency(candidate, reference));
}

bool is_permutation(const Permutation& perm) {
    std::vector<bool> seen(perm.size(), false);
    for (const Label l : perm) {
        if (l >= perm.size() || seen[l]) return false;
        seen[l] = true;
    }
    return true;
}

CrispAssignment apply_permutation(const CrispAssignment& assignment, const Permutation& perm) {
    if (perm.size() != assignment.k || !is_permutation(perm))
        throw Error(ErrorCode::NotAPermutation, "label map is not a bijection on 1..k");
    CrispAssignment out{std::vector<Label>(assignment.size()), assignment.k};
    for (std::size_t i = 0; i < assignment.size(); ++i) out.labels[i] = perm.at(assignment.labels[i]);
    return out;
}

Permutation inverse(const Permutation& perm) {
    if (!is_permutation(perm)) throw Error(ErrorCode::NotAPermutation, "label map is not a bijection");
    Permutation inv(perm.size());
    for (std::size_t a = 0; a < perm.size(); ++a) inv[perm[a]] = static_cast<Label>(a);
    return inv;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
    if (outer.size() != inner.size()) throw Error(ErrorCode::LengthMismatch, "permutations differ in size");
    Permutation out(inner.size());
    for (std::size_t a = 0; a < inner.size(); ++a) out[a] = outer.at(inner[a]);
    return out;
}

}  // namespace truecluster
