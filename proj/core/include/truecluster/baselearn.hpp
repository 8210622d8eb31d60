#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "truecluster/kdtree.hpp"
#include "truecluster/matrix.hpp"
#include "truecluster/random.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

enum class ResampleScheme { bootstrap, subsample };
enum class BaseKind { kmeans, pam, single_link };
enum class PredictKind { representative, nearest_neighbor };

std::string_view to_string(ResampleScheme scheme) noexcept;
std::string_view to_string(BaseKind kind) noexcept;
std::string_view to_string(PredictKind kind) noexcept;

/// Multiset of case indices drawn with replacement.
struct ResampleIndices {
    std::vector<std::size_t> indices;
    ResampleScheme scheme = ResampleScheme::bootstrap;
};

/// n i.i.d. uniform draws from [0, n_cases). Both schemes draw with
/// replacement; they differ only in the intended n (N versus n < N).
ResampleIndices draw_resample(std::size_t n_cases, std::size_t n, ResampleScheme scheme, Rng& rng);

/// Distinct cases of a resample in ascending order with their multiplicities.
struct DistinctCases {
    std::vector<std::size_t> cases;
    std::vector<double> weights;
};
DistinctCases distinct_cases(std::span<const std::size_t> resample);

/// Dense N x N Euclidean distance table, computed once per dataset.
class PairwiseDistances {
  public:
    explicit PairwiseDistances(const Matrix<double>& data);
    std::size_t size() const noexcept { return table_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return table_(i, j); }

  private:
    Matrix<double> table_;
};

/// Result of fitting a base clusterer to one resample. `assignment` labels
/// `cases` (the distinct resample cases, ascending). `representatives` are
/// centers or medoid coordinates for k-means/PAM and every fitted point for
/// single link; `representative_labels[r]` is the cluster of row r.
struct FittedBaseModel {
    BaseKind kind = BaseKind::pam;
    std::size_t k = 0;
    std::vector<std::size_t> cases;
    CrispAssignment assignment;
    Matrix<double> representatives;
    std::vector<Label> representative_labels;
    std::vector<std::size_t> medoids;
    bool degenerate = false;
    double objective = 0.0;
    std::vector<double> objective_trace;
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    double tolerance = 1e-8;
};

/// Lloyd's algorithm with k-means++ seeding over distinct points.
FittedBaseModel fit_kmeans(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, Rng& rng,
                           const KMeansOptions& options = {});

/// Partitioning around medoids: BUILD then best-improvement SWAP over the
/// distinct resample cases, each weighted by its multiplicity. Ties go to
/// the lowest case index. `distances` is optional.
FittedBaseModel fit_pam(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k,
                        const PairwiseDistances* distances = nullptr);

/// Single-linkage agglomeration cut at k clusters. Merges follow ascending
/// (distance, lower case index, higher case index).
FittedBaseModel fit_single_link(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k,
                                const PairwiseDistances* distances = nullptr);

/// Pluggable base cluster algorithm.
class BaseLearner {
  public:
    virtual ~BaseLearner() = default;
    virtual BaseKind kind() const noexcept = 0;
    virtual FittedBaseModel fit(const Matrix<double>& data, std::span<const std::size_t> resample, std::size_t k, Rng& rng) const = 0;
};

std::unique_ptr<BaseLearner> make_learner(BaseKind kind, const PairwiseDistances* distances = nullptr);

/// Label of the Euclidean-nearest representative for every row of `cases`;
/// ties go to the lowest label.
CrispAssignment predict_nearest_representative(const FittedBaseModel& model, const Matrix<double>& cases);

/// 1-NN prediction. `index` is built over the dataset rows and
/// `point_labels[j]` is the label of dataset row j, or kNoLabel for rows
/// outside the resample. Among equidistant neighbours the lowest row wins.
CrispAssignment predict_1nn(const KdTree& index, std::span<const Label> point_labels, std::size_t k, const Matrix<double>& cases);

/// Full-length cluster vector: fitted labels for resample cases, predicted
/// labels for the rest. `index` is required for PredictKind::nearest_neighbor.
/// With non-empty `targets`, only those cases (plus the fitted ones) are
/// labelled and every other entry is kNoLabel.
CrispAssignment complete_assignment(const FittedBaseModel& model, const Matrix<double>& data, PredictKind predictor,
                                    const KdTree* index = nullptr, std::span<const std::size_t> targets = {});

/// Mean silhouette width of a crisp partition; singletons score 0.
double mean_silhouette(const PairwiseDistances& distances, const CrispAssignment& assignment);

}  // namespace truecluster
