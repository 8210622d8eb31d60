#include "truecluster/preprocess.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "truecluster/error.hpp"

namespace truecluster {

namespace {

constexpr double kMinEigenvalue = 1e-12;

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// Splits the whole stream into records; quoted fields may span lines.
std::vector<CsvRecord> parse_records(std::istream& in, char delimiter) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    bool record_has_content = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        if (!field_was_quoted) {
            const auto first = field.find_first_not_of(" \t");
            const auto last = field.find_last_not_of(" \t");
            field = first == std::string::npos ? std::string{} : field.substr(first, last - first + 1);
        }
        current.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        if (record_has_content || current.fields.size() > 1 || !current.fields.front().empty()) records.push_back(std::move(current));
        current = CsvRecord{};
        current.line = line;
        record_has_content = false;
    };

    char c = 0;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            if (!field.empty() && field.find_first_not_of(" \t") != std::string::npos)
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": quote inside unquoted field", line);
            field.clear();
            quoted = true;
            field_was_quoted = true;
            record_has_content = true;
        } else if (c == delimiter) {
            end_field();
            record_has_content = true;
        } else if (c == '\r') {
            if (in.peek() != '\n') field.push_back(c);
        } else if (c == '\n') {
            ++line;
            end_record();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": unterminated quoted field", line);
    if (!field.empty() || record_has_content || !current.fields.empty()) end_record();
    return records;
}

double parse_number(const std::string& text, std::size_t line, const std::string& column) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + column + ": not a number: '" + text + "'", line);
    if (!std::isfinite(value))
        throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(line) + ", column " + column + ": non-finite value", line);
    return value;
}

std::vector<double> column_means(const Matrix<double>& x) {
    std::vector<double> means(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) means[j] += x(i, j);
    for (auto& m : means) m /= static_cast<double>(x.rows());
    return means;
}

std::vector<double> column_sds(const Matrix<double>& x, const std::vector<double>& means) {
    std::vector<double> sds(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) sds[j] += (x(i, j) - means[j]) * (x(i, j) - means[j]);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        sds[j] = std::sqrt(sds[j] / static_cast<double>(x.rows() - 1));
        if (!(sds[j] > 0.0)) throw Error(ErrorCode::ConstantColumn, "column " + std::to_string(j + 1) + " is constant", j);
    }
    return sds;
}

Matrix<double> standardized(const Matrix<double>& x, const std::vector<double>& means, const std::vector<double>& sds) {
    Matrix<double> z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) z(i, j) = (x(i, j) - means[j]) / sds[j];
    return z;
}

}  // namespace

LoadedData read_csv(std::istream& in, const CsvOptions& options) {
    const auto records = parse_records(in, options.delimiter);
    if (records.empty()) throw Error(ErrorCode::ParseError, "empty input: a header row is required", 1);
    const auto& header = records.front().fields;

    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (!position.emplace(header[j], j).second) throw Error(ErrorCode::ParseError, "duplicate column name '" + header[j] + "'", 1);
    auto find = [&](const std::string& name) {
        const auto it = position.find(name);
        if (it == position.end()) throw Error(ErrorCode::InvalidArgument, "no column named '" + name + "'");
        return it->second;
    };

    const std::optional<std::size_t> label_col = options.label_column.empty() ? std::nullopt : std::optional(find(options.label_column));
    const std::optional<std::size_t> id_col = options.id_column.empty() ? std::nullopt : std::optional(find(options.id_column));
    std::vector<std::size_t> feature_cols;
    if (options.columns.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (j != label_col && j != id_col) feature_cols.push_back(j);
    } else {
        for (const auto& name : options.columns) feature_cols.push_back(find(name));
    }
    if (feature_cols.empty()) throw Error(ErrorCode::InvalidArgument, "no feature columns selected");
    if (records.size() < 2) throw Error(ErrorCode::ParseError, "no data rows", 1);

    const std::size_t n = records.size() - 1;
    Matrix<double> values(n, feature_cols.size());
    std::vector<std::string> ids(n);
    std::vector<std::string> names;
    for (const auto j : feature_cols) names.push_back(header[j]);

    LoadedData out;
    std::vector<Label> labels;
    std::unordered_map<std::string, Label> level_of;
    for (std::size_t i = 0; i < n; ++i) {
        const CsvRecord& rec = records[i + 1];
        if (rec.fields.size() != header.size())
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(rec.line) + ": expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(rec.fields.size()),
                        rec.line);
        for (std::size_t c = 0; c < feature_cols.size(); ++c) values(i, c) = parse_number(rec.fields[feature_cols[c]], rec.line, header[feature_cols[c]]);
        ids[i] = id_col ? rec.fields[*id_col] : std::to_string(i + 1);
        if (label_col) {
            const std::string& level = rec.fields[*label_col];
            const auto [it, inserted] = level_of.emplace(level, static_cast<Label>(out.label_levels.size()));
            if (inserted) out.label_levels.push_back(level);
            labels.push_back(it->second);
        }
    }
    out.data = Dataset(std::move(values), std::move(ids), std::move(names));
    if (label_col) out.labels = CrispAssignment{std::move(labels), out.label_levels.size()};
    return out;
}

LoadedData load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_csv(in, options);
}

LabelColumn load_labels(const std::filesystem::path& path, const std::string& column, char delimiter, const std::string& id_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    const auto records = parse_records(in, delimiter);
    if (records.size() < 2) throw Error(ErrorCode::ParseError, path.string() + ": no data rows", 1);
    const auto& header = records.front().fields;
    auto find = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error(ErrorCode::InvalidArgument, path.string() + ": no column named '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t label_col = find(column);
    const std::optional<std::size_t> id_col = id_column.empty() ? std::nullopt : std::optional(find(id_column));

    LabelColumn out;
    std::unordered_map<std::string, Label> level_of;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const CsvRecord& rec = records[r];
        if (rec.fields.size() != header.size())
            throw Error(ErrorCode::ParseError, path.string() + ": line " + std::to_string(rec.line) + " has the wrong field count", rec.line);
        const std::string& level = rec.fields[label_col];
        const auto [it, inserted] = level_of.emplace(level, static_cast<Label>(out.levels.size()));
        if (inserted) out.levels.push_back(level);
        out.labels.labels.push_back(it->second);
        out.row_ids.push_back(id_col ? rec.fields[*id_col] : std::to_string(r));
    }
    out.labels.k = out.levels.size();
    return out;
}

std::size_t column_index(const Dataset& data, const std::string& name) {
    const auto& names = data.column_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw Error(ErrorCode::InvalidArgument, "no column named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

Dataset ratio_transform(const Dataset& data, std::size_t denominator) {
    if (denominator >= data.dims()) throw Error(ErrorCode::InvalidArgument, "denominator column out of range", denominator);
    Matrix<double> out = data.values();
    std::vector<std::string> names = data.column_names();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = out(i, denominator);
        if (d == 0.0) throw Error(ErrorCode::DivisionByZero, "row " + data.row_ids()[i] + ": zero denominator", i);
        for (std::size_t j = 0; j < data.dims(); ++j)
            if (j != denominator) out(i, j) /= d;
    }
    for (std::size_t j = 0; j < names.size(); ++j)
        if (j != denominator) names[j] += "/" + data.column_names()[denominator];
    return Dataset(std::move(out), data.row_ids(), std::move(names));
}

Dataset standardize(const Dataset& data) {
    const auto means = column_means(data.values());
    const auto sds = column_sds(data.values(), means);
    return Dataset(standardized(data.values(), means, sds), data.row_ids(), data.column_names());
}

SphereResult sphere(const Dataset& data, bool whiten, std::optional<std::size_t> keep_components) {
    const std::size_t n = data.size();
    const std::size_t m = data.dims();
    SphereResult result;
    SphereParams& params = result.params;
    params.whiten = whiten;
    params.means = column_means(data.values());
    params.sds = column_sds(data.values(), params.means);
    const Matrix<double> z = standardized(data.values(), params.means, params.sds);

    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a; b < m; ++b) corr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += z(i, a) * z(i, b);
    for (Eigen::Index a = 0; a < corr.rows(); ++a)
        for (Eigen::Index b = a; b < corr.cols(); ++b) {
            corr(a, b) /= static_cast<double>(n - 1);
            corr(b, a) = corr(a, b);
        }

    // Ascending eigenvalues from the solver; components are emitted in
    // descending order.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigen-decomposition failed");
    std::vector<std::size_t> kept;
    for (Eigen::Index c = corr.rows() - 1; c >= 0; --c) {
        if (solver.eigenvalues()(c) < kMinEigenvalue) {
            ++params.dropped;
            continue;
        }
        kept.push_back(static_cast<std::size_t>(c));
    }
    if (params.dropped > 0)
        result.warnings.push_back("dropped " + std::to_string(params.dropped) + " component(s) with eigenvalue below 1e-12");
    if (kept.empty()) throw Error(ErrorCode::InvalidArgument, "no component with positive variance");
    if (keep_components && *keep_components < kept.size()) {
        if (*keep_components == 0) throw Error(ErrorCode::InvalidArgument, "keep_components must be at least 1");
        kept.resize(*keep_components);
    }

    params.eigenvectors = Matrix<double>(m, kept.size());
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const auto col = static_cast<Eigen::Index>(kept[c]);
        params.eigenvalues.push_back(solver.eigenvalues()(col));
        // Sign convention: the largest-magnitude entry is positive (first one on ties).
        Eigen::Index pivot = 0;
        for (Eigen::Index r = 1; r < static_cast<Eigen::Index>(m); ++r)
            if (std::abs(solver.eigenvectors()(r, col)) > std::abs(solver.eigenvectors()(pivot, col))) pivot = r;
        const double sign = solver.eigenvectors()(pivot, col) < 0.0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < m; ++r) params.eigenvectors(r, c) = sign * solver.eigenvectors()(static_cast<Eigen::Index>(r), col);
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < kept.size(); ++c) names.push_back("PC" + std::to_string(c + 1));
    result.data = Dataset(apply_sphere(params, data.values()), data.row_ids(), std::move(names));
    return result;
}

Matrix<double> apply_sphere(const SphereParams& params, const Matrix<double>& values) {
    const std::size_t m = params.means.size();
    const std::size_t c = params.eigenvalues.size();
    if (values.cols() != m) throw Error(ErrorCode::LengthMismatch, "column count differs from the fitted parameters");
    Matrix<double> out(values.rows(), c, 0.0);
    std::vector<double> z(m);
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t j = 0; j < m; ++j) z[j] = (values(i, j) - params.means[j]) / params.sds[j];
        for (std::size_t p = 0; p < c; ++p) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += z[j] * params.eigenvectors(j, p);
            out(i, p) = params.whiten ? s / std::sqrt(params.eigenvalues[p]) : s;
        }
    }
    return out;
}

PreprocessResult preprocess(const Dataset& data, const PreprocessSpec& spec) {
    PreprocessResult result{data, std::nullopt, {}};
    if (spec.ratio_column) result.data = ratio_transform(result.data, column_index(result.data, *spec.ratio_column));
    if (spec.sphere) {
        SphereResult s = sphere(result.data, spec.whiten, spec.keep_components);
        result.data = std::move(s.data);
        result.sphere = std::move(s.params);
        result.warnings = std::move(s.warnings);
    } else if (spec.standardize) {
        result.data = standardize(result.data);
    }
    return result;
}

}  // namespace truecluster
