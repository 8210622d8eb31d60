#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "truecluster/matrix.hpp"
#include "truecluster/types.hpp"

namespace truecluster {

struct CsvOptions {
    char delimiter = ',';
    /// Column holding true class labels (excluded from the features).
    std::string label_column;
    /// Column holding case identifiers; line numbers are used otherwise.
    std::string id_column;
    /// Feature columns in order; empty selects every remaining column.
    std::vector<std::string> columns;
};

struct LoadedData {
    Dataset data;
    /// Present when a label column was requested. Levels are numbered in
    /// order of first appearance.
    std::optional<CrispAssignment> labels;
    std::vector<std::string> label_levels;
};

/// RFC-4180 style reader (quoted fields, doubled quotes, CRLF); a header
/// row is required. Errors: ParseError (index = 1-based line), NonFiniteValue.
LoadedData read_csv(std::istream& in, const CsvOptions& options = {});
LoadedData load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// One categorical column read as a crisp assignment (e.g. a solution
/// file or true classes), levels numbered in order of first appearance.
struct LabelColumn {
    std::vector<std::string> row_ids;
    CrispAssignment labels;
    std::vector<std::string> levels;
};
LabelColumn load_labels(const std::filesystem::path& path, const std::string& column, char delimiter = ',',
                        const std::string& id_column = {});

/// Index of a named column; throws InvalidArgument if absent.
std::size_t column_index(const Dataset& data, const std::string& name);

/// Divides every column except `denominator` by it; the denominator column
/// is kept unchanged. Throws DivisionByZero naming the row.
Dataset ratio_transform(const Dataset& data, std::size_t denominator);

/// Fitted standardisation and principal-axis parameters. `eigenvectors` is
/// M x C with components in descending eigenvalue order.
struct SphereParams {
    std::vector<double> means;
    std::vector<double> sds;
    std::vector<double> eigenvalues;
    Matrix<double> eigenvectors;
    /// Scale components to unit variance (whitening) or only rotate.
    bool whiten = true;
    std::size_t dropped = 0;
};

struct SphereResult {
    Dataset data;
    SphereParams params;
    std::vector<std::string> warnings;
};

/// Correlation-matrix PCA. Components with eigenvalue below 1e-12 are
/// dropped with a warning; `keep_components` truncates further. Throws
/// ConstantColumn.
SphereResult sphere(const Dataset& data, bool whiten = true, std::optional<std::size_t> keep_components = std::nullopt);

/// Projects new rows with previously fitted parameters.
Matrix<double> apply_sphere(const SphereParams& params, const Matrix<double>& values);

/// Column standardisation (sample sd, N - 1). Throws ConstantColumn.
Dataset standardize(const Dataset& data);

struct PreprocessSpec {
    std::optional<std::string> ratio_column;
    bool standardize = false;
    bool sphere = false;
    bool whiten = true;
    std::optional<std::size_t> keep_components;
};

struct PreprocessResult {
    Dataset data;
    std::optional<SphereParams> sphere;
    std::vector<std::string> warnings;
};

PreprocessResult preprocess(const Dataset& data, const PreprocessSpec& spec);

}  // namespace truecluster
