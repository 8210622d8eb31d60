#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "truecluster/matrix.hpp"
#include "truecluster/types.hpp"

/// Information-theoretic evaluation of a membership probability matrix.
/// All quantities are in bits and 0 * log2(0) is taken as 0.
namespace truecluster::cic {

/// Entropy -sum p log2 p. Throws NotADistribution unless entries lie in
/// [0,1] and sum to 1 within 1e-9.
double entropy(std::span<const double> p);

/// sum_i log2 P[i, argmax_k P[i,k]] (argmax ties to the lowest column).
double pseudo_log2_likelihood(const ProbabilityMatrix& probs);

/// Mean row entropy of the matrix; in [0, log2 K].
double model_uncertainty(const ProbabilityMatrix& probs);

/// Column sums normalised to a distribution.
std::vector<double> cluster_probabilities(const ProbabilityMatrix& probs);

/// D[i,k] = -P[i,k] * log2(1 - |P[i,k] - p[k]|), zero where P[i,k] = 0.
Matrix<double> weighted_log_deviation(const ProbabilityMatrix& probs, std::span<const double> cluster_probs);

/// (2^H - 1) / (N - 1), H the entropy of the cluster probabilities. The
/// exponent is the entropy itself, i.e. 2^H is the effective number of
/// clusters: one cluster gives 0 and N singleton clusters give 1.
double relative_model_complexity(std::span<const double> cluster_probs, std::size_t n_cases);

struct ModelInformation {
    double information = 0.0;
    Matrix<double> cell_information;
};

/// I[i,k] = D[i,k] * (1 - rmc); information = (1/N) sum_ik I[i,k].
ModelInformation model_information(const Matrix<double>& deviation, double rmc);

struct CicBreakdown {
    std::vector<double> cluster_probs;
    double entropy_of_marginals = 0.0;
    double uncertainty = 0.0;
    Matrix<double> deviation;
    double rmc = 0.0;
    Matrix<double> cell_information;
    double information = 0.0;
    double cic = 0.0;
    /// CIC[i,k] = I[i,k] + P[i,k] log2 P[i,k]; mean row sum equals cic.
    Matrix<double> cellwise;
    /// Empty when K = 1.
    std::vector<double> gsd;
};

/// Full breakdown. For K = 1 every quantity is zero (cic = 0 by definition).
CicBreakdown evaluate(const ProbabilityMatrix& probs);

/// CIC alone, without materialising the N x K diagnostic matrices.
double score(const ProbabilityMatrix& probs);

/// CIC of normalize_votes(votes) without allocating it.
double score(const VoteMatrix& votes);

/// GSD_i = 2 P_best / (P_best + P_second) - 1. Throws KTooSmall for K = 1.
std::vector<double> gsd(const ProbabilityMatrix& probs);

}  // namespace truecluster::cic
