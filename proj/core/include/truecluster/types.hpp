#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "truecluster/matrix.hpp"
#include "truecluster/random.hpp"

namespace truecluster {

/// Cluster label. Labels are 0-based in memory and 1-based in every file
/// the library reads or writes.
using Label = std::uint32_t;

/// Marks a case without a label (e.g. outside a resample).
inline constexpr Label kNoLabel = 0xffffffffU;

/// N x M matrix of finite feature values plus per-case identifiers.
class Dataset {
  public:
    Dataset() = default;

    /// Validates N >= 2, M >= 1 and finiteness. Empty `row_ids` are filled
    /// with "1".."N"; empty `column_names` with "x1".."xM".
    Dataset(Matrix<double> values, std::vector<std::string> row_ids = {}, std::vector<std::string> column_names = {});

    std::size_t size() const noexcept { return values_.rows(); }
    std::size_t dims() const noexcept { return values_.cols(); }
    const Matrix<double>& values() const noexcept { return values_; }
    std::span<const double> row(std::size_t i) const noexcept { return values_.row(i); }
    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    const std::vector<std::string>& column_names() const noexcept { return column_names_; }

  private:
    Matrix<double> values_;
    std::vector<std::string> row_ids_;
    std::vector<std::string> column_names_;
};

/// Crisp cluster vector. Occupied labels may be a strict subset of [0, k).
struct CrispAssignment {
    std::vector<Label> labels;
    std::size_t k = 0;

    std::size_t size() const noexcept { return labels.size(); }
    /// Number of distinct labels actually used.
    std::size_t occupied() const;
    /// Throws InvalidArgument if any label is >= k.
    void validate() const;

    bool operator==(const CrispAssignment&) const = default;
};

/// N x K vote counts. Single writer; copies are cheap enough for read-out.
class VoteMatrix {
  public:
    VoteMatrix() = default;
    VoteMatrix(std::size_t cases, std::size_t k) : counts_(cases, k, 0) {}
    VoteMatrix(Matrix<std::uint32_t> counts, std::uint64_t rounds) : counts_(std::move(counts)), rounds_(rounds) {}

    std::size_t cases() const noexcept { return counts_.rows(); }
    std::size_t k() const noexcept { return counts_.cols(); }
    const Matrix<std::uint32_t>& counts() const noexcept { return counts_; }
    std::uint64_t total_resamples() const noexcept { return rounds_; }
    std::uint64_t row_sum(std::size_t i) const noexcept;

    /// Adds one vote per case in `assignment` (must cover every case).
    void vote(const CrispAssignment& assignment);
    /// Adds one vote for each listed case only (batched path).
    void vote(std::span<const std::size_t> cases, std::span<const Label> labels);

  private:
    Matrix<std::uint32_t> counts_;
    std::uint64_t rounds_ = 0;
};

/// N x K row-stochastic matrix of membership probabilities.
class ProbabilityMatrix {
  public:
    ProbabilityMatrix() = default;
    /// Validates entries in [0,1] and row sums equal to 1 within 1e-9.
    explicit ProbabilityMatrix(Matrix<double> probs);

    std::size_t cases() const noexcept { return probs_.rows(); }
    std::size_t k() const noexcept { return probs_.cols(); }
    const Matrix<double>& values() const noexcept { return probs_; }
    double operator()(std::size_t i, std::size_t k) const noexcept { return probs_(i, k); }
    std::span<const double> row(std::size_t i) const noexcept { return probs_.row(i); }

  private:
    Matrix<double> probs_;
};

/// Divides each row by its sum. Throws ZeroRowSum naming the first empty row.
ProbabilityMatrix normalize_votes(const VoteMatrix& votes);

/// Row-wise argmax of the counts; ties are resolved by a uniform draw among
/// the tied columns using `rng`.
CrispAssignment majority_estimate(const VoteMatrix& votes, Rng& rng);

/// Majority label of one row of counts (ties drawn with `rng`); kNoLabel
/// for an all-zero row.
Label majority_label(std::span<const std::uint32_t> counts, Rng& rng);

/// Row-wise argmax of a probability matrix, ties to the lowest column.
CrispAssignment argmax_assignment(const ProbabilityMatrix& probs);

}  // namespace truecluster
