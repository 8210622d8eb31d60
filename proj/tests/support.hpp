#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "truecluster/matching.hpp"
#include "truecluster/random.hpp"
#include "truecluster/types.hpp"

namespace tctest {

using namespace truecluster;

inline ProbabilityMatrix random_probs(Rng& rng, std::size_t n, std::size_t k, double zero_share = 0.2) {
    Matrix<double> m(n, k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            m(i, c) = rng.uniform01() < zero_share ? 0.0 : rng.uniform01();
            total += m(i, c);
        }
        if (total == 0.0) {
            m(i, rng.uniform_index(k)) = 1.0;
            total = 1.0;
        }
        for (std::size_t c = 0; c < k; ++c) m(i, c) /= total;
    }
    return ProbabilityMatrix(std::move(m));
}

inline CrispAssignment random_assignment(Rng& rng, std::size_t n, std::size_t k) {
    CrispAssignment a{std::vector<Label>(n), k};
    for (auto& l : a.labels) l = static_cast<Label>(rng.uniform_index(k));
    return a;
}

inline ProbabilityMatrix crisp_probs(const CrispAssignment& a) {
    Matrix<double> m(a.size(), a.k, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) m(i, a.labels[i]) = 1.0;
    return ProbabilityMatrix(std::move(m));
}

// Exhaustive maximum trace and the lexicographically smallest optimal permutation.
struct BruteMatch {
    std::int64_t best = 0;
    Permutation perm;
};

inline BruteMatch brute_force_match(const ContingencyTable& table) {
    const std::size_t k = table.rows();
    Permutation p(k);
    std::iota(p.begin(), p.end(), Label{0});
    BruteMatch out{-1, {}};
    do {
        std::int64_t s = 0;
        for (std::size_t r = 0; r < k; ++r) s += table(r, p[r]);
        if (s > out.best) out = {s, p};
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline Matrix<double> random_points(Rng& rng, std::size_t n, std::size_t m, double scale = 1.0) {
    Matrix<double> x(n, m);
    for (auto& v : x.data()) v = scale * rng.normal();
    return x;
}

}  // namespace tctest
