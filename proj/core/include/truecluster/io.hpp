#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "truecluster/cic.hpp"
#include "truecluster/metrics.hpp"
#include "truecluster/preprocess.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

/// Shortest decimal that reads back to the same double; "NaN" and
/// "Inf"/"-Inf" for non-finite values.
std::string format_number(double value);

/// Header `case<TAB>name...`, one row per case.
void write_dataset_tsv(std::ostream& out, const Dataset& data);
/// Header `case<TAB>k1..kK`.
void write_probabilities_tsv(std::ostream& out, const ProbabilityMatrix& probs, std::span<const std::string> row_ids);
void write_votes_tsv(std::ostream& out, const VoteMatrix& votes, std::span<const std::string> row_ids);
/// Header `case<TAB>label`; labels written 1-based.
void write_assignment_tsv(std::ostream& out, const CrispAssignment& assignment, std::span<const std::string> row_ids);
/// Header `case<TAB>majority<TAB>gsd<TAB>cic`; cic is the row sum of the
/// cell-wise CIC. GSD is written as NA for K = 1.
void write_diagnostics_tsv(std::ostream& out, const CrispAssignment& majority, const cic::CicBreakdown& breakdown,
                           std::span<const std::string> row_ids);
/// Header `round<TAB>cic`, rounds 1-based.
void write_trace_tsv(std::ostream& out, std::span<const double> trace);
/// One-column TSV with the given header.
void write_distribution_tsv(std::ostream& out, const std::string& name, std::span<const double> values);

/// JSON documents (two-space indentation, trailing newline).
std::string to_json(const ProbabilityMatrix& probs);
std::string to_json(const VoteMatrix& votes);
std::string to_json(const cic::CicBreakdown& breakdown);
std::string to_json(const SphereParams& params, std::span<const std::string> input_columns);
std::string to_json(const DistributionSummary& summary);
std::string to_json(const AgreementReport& report);

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

/// 64-bit FNV-1a digest of a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace truecluster
