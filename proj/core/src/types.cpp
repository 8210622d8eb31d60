#include "truecluster/types.hpp"

#include <cmath>
#include <numeric>

#include "truecluster/error.hpp"

namespace truecluster {

Dataset::Dataset(Matrix<double> values, std::vector<std::string> row_ids, std::vector<std::string> column_names)
    : values_(std::move(values)), row_ids_(std::move(row_ids)), column_names_(std::move(column_names)) {
    if (values_.rows() < 2) throw Error(ErrorCode::InvalidArgument, "a dataset needs at least 2 cases");
    if (values_.cols() < 1) throw Error(ErrorCode::InvalidArgument, "a dataset needs at least 1 feature");
    for (std::size_t i = 0; i < values_.rows(); ++i)
        for (const double v : values_.row(i))
            if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite value in case " + std::to_string(i + 1), i);
    if (row_ids_.empty()) {
        row_ids_.reserve(values_.rows());
        for (std::size_t i = 0; i < values_.rows(); ++i) row_ids_.push_back(std::to_string(i + 1));
    } else if (row_ids_.size() != values_.rows()) {
        throw Error(ErrorCode::LengthMismatch, "row id count differs from case count");
    }
    if (column_names_.empty()) {
        for (std::size_t j = 0; j < values_.cols(); ++j) column_names_.push_back("x" + std::to_string(j + 1));
    } else if (column_names_.size() != values_.cols()) {
        throw Error(ErrorCode::LengthMismatch, "column name count differs from feature count");
    }
}

std::size_t CrispAssignment::occupied() const {
    std::vector<bool> seen(k, false);
    std::size_t count = 0;
    for (const Label l : labels) {
        if (l < k && !seen[l]) {
            seen[l] = true;
            ++count;
        }
    }
    return count;
}

void CrispAssignment::validate() const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= k)
            throw Error(ErrorCode::InvalidArgument,
                        "label " + std::to_string(labels[i] + 1) + " of case " + std::to_string(i + 1) + " exceeds k=" + std::to_string(k), i);
}

std::uint64_t VoteMatrix::row_sum(std::size_t i) const noexcept {
    std::uint64_t s = 0;
    for (const auto c : counts_.row(i)) s += c;
    return s;
}

void VoteMatrix::vote(const CrispAssignment& assignment) {
    if (assignment.size() != cases()) throw Error(ErrorCode::LengthMismatch, "assignment length differs from vote matrix rows");
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const Label l = assignment.labels[i];
        if (l >= k()) throw Error(ErrorCode::InvalidArgument, "label out of range", i);
        ++counts_(i, l);
    }
    ++rounds_;
}

void VoteMatrix::vote(std::span<const std::size_t> cases, std::span<const Label> labels) {
    if (cases.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "case and label lists differ in length");
    for (std::size_t j = 0; j < cases.size(); ++j) {
        if (cases[j] >= this->cases() || labels[j] >= k()) throw Error(ErrorCode::InvalidArgument, "vote out of range", cases[j]);
        ++counts_(cases[j], labels[j]);
    }
    ++rounds_;
}

ProbabilityMatrix::ProbabilityMatrix(Matrix<double> probs) : probs_(std::move(probs)) {
    for (std::size_t i = 0; i < probs_.rows(); ++i) {
        double s = 0.0;
        for (const double p : probs_.row(i)) {
            if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::NotADistribution, "probability outside [0,1] in case " + std::to_string(i + 1), i);
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorCode::NotADistribution, "row " + std::to_string(i + 1) + " does not sum to 1", i);
    }
}

ProbabilityMatrix normalize_votes(const VoteMatrix& votes) {
    Matrix<double> probs(votes.cases(), votes.k());
    for (std::size_t i = 0; i < votes.cases(); ++i) {
        const std::uint64_t total = votes.row_sum(i);
        if (total == 0) throw Error(ErrorCode::ZeroRowSum, "case " + std::to_string(i + 1) + " received no votes", i);
        const auto counts = votes.counts().row(i);
        auto out = probs.row(i);
        for (std::size_t k = 0; k < counts.size(); ++k) out[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
    }
    return ProbabilityMatrix(std::move(probs));
}

Label majority_label(std::span<const std::uint32_t> counts, Rng& rng) {
    std::uint32_t best = 0;
    std::size_t ties = 0;
    Label first = kNoLabel;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > best) {
            best = counts[k];
            first = static_cast<Label>(k);
            ties = 1;
        } else if (counts[k] == best && best > 0) {
            ++ties;
        }
    }
    if (ties <= 1) return first;
    std::size_t pick = rng.uniform_index(ties);
    for (std::size_t k = first;; ++k)
        if (counts[k] == best && pick-- == 0) return static_cast<Label>(k);
}

CrispAssignment majority_estimate(const VoteMatrix& votes, Rng& rng) {
    CrispAssignment out{std::vector<Label>(votes.cases()), votes.k()};
    for (std::size_t i = 0; i < votes.cases(); ++i) {
        const Label l = majority_label(votes.counts().row(i), rng);
        if (l == kNoLabel) throw Error(ErrorCode::ZeroRowSum, "case " + std::to_string(i + 1) + " received no votes", i);
        out.labels[i] = l;
    }
    return out;
}

CrispAssignment argmax_assignment(const ProbabilityMatrix& probs) {
    CrispAssignment out{std::vector<Label>(probs.cases()), probs.k()};
    for (std::size_t i = 0; i < probs.cases(); ++i) {
        const auto row = probs.row(i);
        std::size_t best = 0;
        for (std::size_t k = 1; k < row.size(); ++k)
            if (row[k] > row[best]) best = k;
        out.labels[i] = static_cast<Label>(best);
    }
    return out;
}

}  // namespace truecluster
