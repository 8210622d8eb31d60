#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace truecluster {

/// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a sub-stream identified by a path of integers (e.g. {k, round, attempt}).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = mix64(base);
    for (const auto p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Seeded random source. Every draw is computed here from the raw 64-bit
/// engine output rather than through <random> distributions, whose
/// algorithms are implementation-defined; runs are bit-reproducible across
/// standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::size_t uniform_index(std::size_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal draw (Box-Muller, one cached spare).
    double normal();

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace truecluster
