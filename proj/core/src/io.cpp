#include "truecluster/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "truecluster/error.hpp"

namespace truecluster {

namespace {

using nlohmann::json;

json matrix_json(const Matrix<double>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (const double v : m.row(i)) row.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_k_header(std::ostream& out, std::size_t k) {
    out << "case";
    for (std::size_t c = 0; c < k; ++c) out << "\tk" << (c + 1);
    out << '\n';
}

void check_ids(std::span<const std::string> row_ids, std::size_t n) {
    if (row_ids.size() != n) throw Error(ErrorCode::LengthMismatch, "row id count differs from case count");
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    if (value == 0.0) return "0";
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

void write_dataset_tsv(std::ostream& out, const Dataset& data) {
    out << "case";
    for (const auto& name : data.column_names()) out << '\t' << name;
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.row_ids()[i];
        for (const double v : data.row(i)) out << '\t' << format_number(v);
        out << '\n';
    }
}

void write_probabilities_tsv(std::ostream& out, const ProbabilityMatrix& probs, std::span<const std::string> row_ids) {
    check_ids(row_ids, probs.cases());
    write_k_header(out, probs.k());
    for (std::size_t i = 0; i < probs.cases(); ++i) {
        out << row_ids[i];
        for (const double v : probs.row(i)) out << '\t' << format_number(v);
        out << '\n';
    }
}

void write_votes_tsv(std::ostream& out, const VoteMatrix& votes, std::span<const std::string> row_ids) {
    check_ids(row_ids, votes.cases());
    write_k_header(out, votes.k());
    for (std::size_t i = 0; i < votes.cases(); ++i) {
        out << row_ids[i];
        for (const auto v : votes.counts().row(i)) out << '\t' << v;
        out << '\n';
    }
}

void write_assignment_tsv(std::ostream& out, const CrispAssignment& assignment, std::span<const std::string> row_ids) {
    check_ids(row_ids, assignment.size());
    out << "case\tlabel\n";
    for (std::size_t i = 0; i < assignment.size(); ++i) out << row_ids[i] << '\t' << (assignment.labels[i] + 1) << '\n';
}

void write_diagnostics_tsv(std::ostream& out, const CrispAssignment& majority, const cic::CicBreakdown& breakdown,
                           std::span<const std::string> row_ids) {
    check_ids(row_ids, majority.size());
    out << "case\tmajority\tgsd\tcic\n";
    for (std::size_t i = 0; i < majority.size(); ++i) {
        double row_cic = 0.0;
        for (const double v : breakdown.cellwise.row(i)) row_cic += v;
        out << row_ids[i] << '\t' << (majority.labels[i] + 1) << '\t' << (breakdown.gsd.empty() ? "NA" : format_number(breakdown.gsd[i]))
            << '\t' << format_number(row_cic) << '\n';
    }
}

void write_trace_tsv(std::ostream& out, std::span<const double> trace) {
    out << "round\tcic\n";
    for (std::size_t r = 0; r < trace.size(); ++r) out << (r + 1) << '\t' << format_number(trace[r]) << '\n';
}

void write_distribution_tsv(std::ostream& out, const std::string& name, std::span<const double> values) {
    out << name << '\n';
    for (const double v : values) out << format_number(v) << '\n';
}

std::string to_json(const ProbabilityMatrix& probs) { return dump(json{{"k", probs.k()}, {"probabilities", matrix_json(probs.values())}}); }

std::string to_json(const VoteMatrix& votes) {
    json rows = json::array();
    for (std::size_t i = 0; i < votes.cases(); ++i) {
        const auto r = votes.counts().row(i);
        rows.push_back(std::vector<std::uint32_t>(r.begin(), r.end()));
    }
    return dump(json{{"k", votes.k()}, {"rounds", votes.total_resamples()}, {"votes", rows}});
}

std::string to_json(const cic::CicBreakdown& b) {
    json doc;
    doc["cic"] = b.cic;
    doc["information"] = b.information;
    doc["uncertainty"] = b.uncertainty;
    doc["rmc"] = b.rmc;
    doc["entropy_of_marginals"] = b.entropy_of_marginals;
    doc["cluster_probs"] = b.cluster_probs;
    doc["gsd"] = b.gsd;
    doc["deviation"] = matrix_json(b.deviation);
    doc["cell_information"] = matrix_json(b.cell_information);
    doc["cellwise"] = matrix_json(b.cellwise);
    return dump(doc);
}

std::string to_json(const SphereParams& p, std::span<const std::string> input_columns) {
    json doc;
    doc["columns"] = std::vector<std::string>(input_columns.begin(), input_columns.end());
    doc["means"] = p.means;
    doc["sds"] = p.sds;
    doc["eigenvalues"] = p.eigenvalues;
    doc["eigenvectors"] = matrix_json(p.eigenvectors);
    doc["whiten"] = p.whiten;
    doc["dropped_components"] = p.dropped;
    return dump(doc);
}

std::string to_json(const DistributionSummary& s) {
    return dump(json{{"count", s.count}, {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}, {"mean", s.mean}});
}

std::string to_json(const AgreementReport& r) {
    return dump(json{{"fraction_matched", r.fraction_matched}, {"kappa", r.kappa}, {"rand", r.rand}, {"crand", r.crand}});
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::array<char, 65536> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buffer[static_cast<std::size_t>(i)]);
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

}  // namespace truecluster
