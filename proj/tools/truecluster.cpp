// Command-line front end: sweep, silhouette, agreement, validate-null,
// generate and preprocess.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "truecluster/error.hpp"
#include "truecluster/generate.hpp"
#include "truecluster/io.hpp"
#include "truecluster/metrics.hpp"
#include "truecluster/preprocess.hpp"
#include "truecluster/sweep.hpp"

namespace fs = std::filesystem;
namespace tc = truecluster;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

#ifndef TRUECLUSTER_VERSION
#define TRUECLUSTER_VERSION "unknown"
#endif

struct DataOptions {
    std::string input;
    std::string label_col;
    std::string id_col;
    std::vector<std::string> columns;
    std::string delimiter = ",";
    std::string ratio_col;
    bool standardize = false;
    bool sphere = false;
    bool rotate_only = false;
};

struct MmccOptions {
    std::string base_name = "pam";
    std::string predict_name = "rep";
    std::string scheme_name = "bootstrap";
    std::string matcher_name = "exact";
    std::size_t kmin = 2;
    std::size_t kmax = 10;
    tc::BaseKind base = tc::BaseKind::pam;
    tc::PredictKind predict = tc::PredictKind::representative;
    tc::ResampleScheme scheme = tc::ResampleScheme::bootstrap;
    std::size_t resample_size = 0;
    std::size_t resamples = 1000;
    tc::MatcherKind matcher = tc::MatcherKind::exact;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t retries = 3;
    bool early_stop = false;
    std::size_t window = 100;
    double epsilon = 0.005;
};

void add_data_options(CLI::App* cmd, DataOptions& d, bool label_required = false) {
    auto* input = cmd->add_option("--input", d.input, "CSV file with a header row")->check(CLI::ExistingFile);
    input->required();
    auto* label = cmd->add_option("--label-col", d.label_col, "Column with true class labels (excluded from features)");
    if (label_required) label->required();
    cmd->add_option("--id-col", d.id_col, "Column with case identifiers");
    cmd->add_option("--columns", d.columns, "Feature columns (default: all others)")->delimiter(',');
    cmd->add_option("--delimiter", d.delimiter, "Field delimiter")->capture_default_str();
    cmd->add_option("--ratio-col", d.ratio_col, "Divide every other feature by this column");
    cmd->add_flag("--standardize", d.standardize, "Scale features to zero mean and unit variance");
    cmd->add_flag("--sphere", d.sphere, "Correlation-matrix PCA whitening");
    cmd->add_flag("--rotate-only", d.rotate_only, "With --sphere: rotate onto principal axes without rescaling");
}

void add_mmcc_options(CLI::App* cmd, MmccOptions& m, bool k_range) {
    if (k_range) {
        cmd->add_option("--kmin", m.kmin, "Smallest K")->capture_default_str();
        cmd->add_option("--kmax", m.kmax, "Largest K")->capture_default_str();
    }
    cmd->add_option("--base", m.base_name, "Base cluster algorithm")->check(CLI::IsMember({"kmeans", "pam", "slink"}))->capture_default_str();
    cmd->add_option("--predict", m.predict_name, "Out-of-resample prediction")->check(CLI::IsMember({"rep", "nn1"}))->capture_default_str();
    cmd->add_option("--scheme", m.scheme_name, "Resampling scheme")->check(CLI::IsMember({"bootstrap", "subsample"}))->capture_default_str();
    cmd->add_option("--resample-size", m.resample_size, "Resample size n (0 = N)")->capture_default_str();
    cmd->add_option("--resamples", m.resamples, "Voting rounds R")->capture_default_str();
    cmd->add_option("--matcher", m.matcher_name, "Label matching")->check(CLI::IsMember({"exact", "heuristic"}))->capture_default_str();
    cmd->add_option("--seed", m.seed, "Random seed")->capture_default_str();
    cmd->add_option("--threads", m.threads, "Worker threads (results do not depend on it)")->capture_default_str();
    cmd->add_option("--retries", m.retries, "Retries of a degenerate resample before it is skipped")->capture_default_str();
    cmd->add_flag("--early-stop", m.early_stop, "Stop once the CIC trace and majority are stable");
    cmd->add_option("--window", m.window, "Early-stop window W")->capture_default_str();
    cmd->add_option("--epsilon", m.epsilon, "Early-stop tolerance in bits")->capture_default_str();
}

// Resolves the enum-valued options after parsing.
void resolve(MmccOptions& m) {
    const std::map<std::string, tc::BaseKind> bases{{"kmeans", tc::BaseKind::kmeans}, {"pam", tc::BaseKind::pam}, {"slink", tc::BaseKind::single_link}};
    const std::map<std::string, tc::PredictKind> predictors{{"rep", tc::PredictKind::representative}, {"nn1", tc::PredictKind::nearest_neighbor}};
    const std::map<std::string, tc::ResampleScheme> schemes{{"bootstrap", tc::ResampleScheme::bootstrap}, {"subsample", tc::ResampleScheme::subsample}};
    const std::map<std::string, tc::MatcherKind> matchers{{"exact", tc::MatcherKind::exact}, {"heuristic", tc::MatcherKind::heuristic}};
    m.base = bases.at(m.base_name);
    m.predict = predictors.at(m.predict_name);
    m.scheme = schemes.at(m.scheme_name);
    m.matcher = matchers.at(m.matcher_name);
}

tc::MmccConfig to_config(const MmccOptions& m) {
    tc::MmccConfig cfg;
    cfg.base = m.base;
    cfg.predictor = m.predict;
    cfg.scheme = m.scheme;
    cfg.resample_size = m.resample_size;
    cfg.resamples = m.resamples;
    cfg.matcher = m.matcher;
    cfg.seed = m.seed;
    cfg.threads = m.threads;
    cfg.degenerate_retry_limit = m.retries;
    cfg.early_stop = m.early_stop;
    cfg.window = m.window;
    cfg.epsilon = m.epsilon;
    return cfg;
}

char delimiter_of(const std::string& d) {
    if (d == "\\t" || d == "tab") return '\t';
    if (d.size() != 1) throw tc::Error(tc::ErrorCode::InvalidArgument, "delimiter must be one character");
    return d[0];
}

char delimiter_for(const fs::path& path) { return path.extension() == ".tsv" ? '\t' : ','; }

struct PreparedData {
    tc::Dataset data;
    std::optional<tc::CrispAssignment> labels;
    std::vector<std::string> label_levels;
    std::vector<std::string> input_columns;
    std::optional<tc::SphereParams> sphere;
    std::string input_digest;
};

PreparedData prepare(const DataOptions& d) {
    tc::CsvOptions csv;
    csv.delimiter = delimiter_of(d.delimiter);
    csv.label_column = d.label_col;
    csv.id_column = d.id_col;
    csv.columns = d.columns;
    tc::LoadedData loaded = tc::load_csv(d.input, csv);

    tc::PreprocessSpec spec;
    if (!d.ratio_col.empty()) spec.ratio_column = d.ratio_col;
    spec.standardize = d.standardize;
    spec.sphere = d.sphere;
    spec.whiten = !d.rotate_only;
    PreparedData out;
    out.input_columns = loaded.data.column_names();
    if (spec.ratio_column) {
        const std::size_t j = tc::column_index(loaded.data, *spec.ratio_column);
        for (std::size_t c = 0; c < out.input_columns.size(); ++c)
            if (c != j) out.input_columns[c] += "/" + *spec.ratio_column;
    }
    tc::PreprocessResult pre = tc::preprocess(loaded.data, spec);
    for (const auto& w : pre.warnings) std::cerr << "warning: " << w << '\n';
    out.data = std::move(pre.data);
    out.sphere = std::move(pre.sphere);
    out.labels = std::move(loaded.labels);
    out.label_levels = std::move(loaded.label_levels);
    out.input_digest = tc::file_digest(d.input);
    return out;
}

json data_json(const DataOptions& d) {
    return json{{"input", fs::path(d.input).filename().string()},
                {"label_col", d.label_col},
                {"id_col", d.id_col},
                {"columns", d.columns},
                {"delimiter", d.delimiter},
                {"ratio_col", d.ratio_col},
                {"standardize", d.standardize},
                {"sphere", d.sphere},
                {"rotate_only", d.rotate_only}};
}

// Thread count is left out on purpose: it never changes results, and the
// manifest must be byte-identical across worker counts.
json mmcc_json(const MmccOptions& m, bool k_range) {
    json j{{"base", std::string(tc::to_string(m.base))},
           {"predict", std::string(tc::to_string(m.predict))},
           {"scheme", std::string(tc::to_string(m.scheme))},
           {"resample_size", m.resample_size},
           {"resamples", m.resamples},
           {"matcher", std::string(tc::to_string(m.matcher))},
           {"seed", m.seed},
           {"retries", m.retries},
           {"early_stop", m.early_stop},
           {"window", m.window},
           {"epsilon", m.epsilon}};
    if (k_range) {
        j["kmin"] = m.kmin;
        j["kmax"] = m.kmax;
    }
    return j;
}

void write_manifest(const fs::path& out, const std::string& command, const json& config, const std::string& digest, std::uint64_t seed) {
    json manifest{{"command", command},
                  {"code_version", TRUECLUSTER_VERSION},
                  {"seed", seed},
                  {"input_hash", "fnv1a64:" + digest},
                  {"config", config}};
    tc::write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
    std::ostringstream os;
    writer(os);
    tc::write_file(path, os.str());
}

void write_preprocessing(const fs::path& out, const PreparedData& prepared) {
    write_stream(out / "data.tsv", [&](std::ostream& os) { tc::write_dataset_tsv(os, prepared.data); });
    if (prepared.sphere) tc::write_file(out / "preprocessing.json", tc::to_json(*prepared.sphere, prepared.input_columns));
}

std::string cell(const std::optional<double>& v) { return v ? tc::format_number(*v) : "NA"; }

int cmd_sweep(const DataOptions& d, const MmccOptions& m, const fs::path& out, bool write_json) {
    const PreparedData prepared = prepare(d);
    const tc::MmccContext context(prepared.data.values(), m.base, m.predict);
    tc::SweepConfig sweep;
    sweep.k_min = m.kmin;
    sweep.k_max = m.kmax;
    sweep.mmcc = to_config(m);
    sweep.threads = m.threads;
    const tc::SweepReport report = tc::run_sweep(context, sweep);
    const auto& ids = prepared.data.row_ids();

    write_stream(out / "cic_table.tsv", [&](std::ostream& os) {
        os << "k\tsilhouette\tinformation\tuncertainty\tcic\tdegenerate\n";
        for (const auto& model : report.models) {
            const bool fitted = model.result.has_value();
            if (fitted && std::abs(model.breakdown.cic - (model.breakdown.information - model.breakdown.uncertainty)) > 1e-9)
                throw tc::Error(tc::ErrorCode::InvalidArgument, "CIC identity violated for k=" + std::to_string(model.k));
            os << model.k << '\t' << cell(model.silhouette) << '\t' << (fitted ? tc::format_number(model.breakdown.information) : "NA") << '\t'
               << (fitted ? tc::format_number(model.breakdown.uncertainty) : "NA") << '\t'
               << (fitted ? tc::format_number(model.breakdown.cic) : "NA") << '\t' << (model.degenerate ? 1 : 0) << '\n';
        }
    });

    json summary{{"status", report.status == tc::SweepStatus::selected ? "selected" : "all_degenerate"}};
    summary["selected_k"] = report.selected_k ? json(*report.selected_k) : json(nullptr);
    json models = json::array();
    for (const auto& model : report.models) {
        json entry{{"k", model.k}, {"degenerate", model.degenerate}, {"degenerate_fraction", model.degenerate_fraction}};
        if (model.result) {
            const tc::MmccResult& r = *model.result;
            const std::string tag = "k" + std::to_string(model.k);
            write_stream(out / ("probs_" + tag + ".tsv"), [&](std::ostream& os) { tc::write_probabilities_tsv(os, r.probs, ids); });
            write_stream(out / ("diagnostics_" + tag + ".tsv"), [&](std::ostream& os) { tc::write_diagnostics_tsv(os, r.majority, model.breakdown, ids); });
            write_stream(out / ("cic_trace_" + tag + ".tsv"), [&](std::ostream& os) { tc::write_trace_tsv(os, r.cic_trace); });
            write_stream(out / ("majority_" + tag + ".tsv"), [&](std::ostream& os) { tc::write_assignment_tsv(os, r.majority, ids); });
            if (model.k >= 2) {
                tc::MmccConfig one = sweep.mmcc;
                one.k = model.k;
                const tc::CrispAssignment standard = tc::standard_solution(context, one);
                write_stream(out / ("standard_" + tag + ".tsv"), [&](std::ostream& os) { tc::write_assignment_tsv(os, standard, ids); });
                if (prepared.labels) {
                    const tc::AgreementReport a = tc::agreement(standard, *prepared.labels);
                    entry["standard_agreement"] = {{"fraction_matched", a.fraction_matched}, {"kappa", a.kappa}, {"rand", a.rand}, {"crand", a.crand}};
                }
            }
            if (write_json) {
                tc::write_file(out / ("probs_" + tag + ".json"), tc::to_json(r.probs));
                tc::write_file(out / ("votes_" + tag + ".json"), tc::to_json(r.votes));
                tc::write_file(out / ("cic_" + tag + ".json"), tc::to_json(model.breakdown));
            }
            entry["information"] = model.breakdown.information;
            entry["uncertainty"] = model.breakdown.uncertainty;
            entry["cic"] = model.breakdown.cic;
            entry["rmc"] = model.breakdown.rmc;
            entry["cluster_probs"] = model.breakdown.cluster_probs;
            entry["rounds_used"] = r.rounds_used;
            entry["degenerate_rounds"] = r.degenerate_rounds;
            if (prepared.labels) {
                const tc::AgreementReport a = tc::agreement(r.majority, *prepared.labels);
                entry["agreement"] = {{"fraction_matched", a.fraction_matched}, {"kappa", a.kappa}, {"rand", a.rand}, {"crand", a.crand}};
            }
        }
        if (model.silhouette) entry["silhouette"] = *model.silhouette;
        models.push_back(std::move(entry));
    }
    summary["models"] = std::move(models);
    tc::write_file(out / "summary.json", summary.dump(2) + "\n");
    write_preprocessing(out, prepared);
    write_manifest(out, "sweep", json{{"data", data_json(d)}, {"mmcc", mmcc_json(m, true)}}, prepared.input_digest, m.seed);

    std::cout << "k\tsilhouette\tinformation\tuncertainty\tcic\tdegenerate\n";
    for (const auto& model : report.models) {
        std::cout << model.k << '\t' << cell(model.silhouette) << '\t'
                  << (model.result ? tc::format_number(model.breakdown.information) : "NA") << '\t'
                  << (model.result ? tc::format_number(model.breakdown.uncertainty) : "NA") << '\t'
                  << (model.result ? tc::format_number(model.breakdown.cic) : "NA") << '\t' << (model.degenerate ? "*" : "") << '\n';
    }
    if (!report.selected_k) {
        std::cerr << "all models degenerate: no K selected\n";
        return kExitDegenerate;
    }
    std::cout << "selected k: " << *report.selected_k << '\n';
    return kExitOk;
}

int cmd_silhouette(const DataOptions& d, const MmccOptions& m, const fs::path& out) {
    const PreparedData prepared = prepare(d);
    const tc::MmccContext context(prepared.data.values(), m.base, m.predict);
    const auto widths = tc::silhouette_baseline(context, to_config(m), m.kmin, m.kmax, m.threads);
    write_stream(out / "silhouette.tsv", [&](std::ostream& os) {
        os << "k\tsilhouette\n";
        for (std::size_t j = 0; j < widths.size(); ++j) os << (m.kmin + j) << '\t' << tc::format_number(widths[j]) << '\n';
    });
    write_manifest(out, "silhouette", json{{"data", data_json(d)}, {"mmcc", mmcc_json(m, true)}}, prepared.input_digest, m.seed);
    for (std::size_t j = 0; j < widths.size(); ++j) std::cout << (m.kmin + j) << '\t' << tc::format_number(widths[j]) << '\n';
    return kExitOk;
}

struct AgreementOptions {
    std::string solution;
    std::string solution_col = "label";
    std::string reference;
    std::string reference_col = "label";
    std::string standard;
    std::string standard_col = "label";
};

int cmd_agreement(const AgreementOptions& a, const fs::path& out) {
    const auto solution = tc::load_labels(a.solution, a.solution_col, delimiter_for(a.solution));
    const auto reference = tc::load_labels(a.reference, a.reference_col, delimiter_for(a.reference));
    if (solution.labels.size() != reference.labels.size())
        throw tc::Error(tc::ErrorCode::LengthMismatch, "solution and reference differ in case count");
    const tc::AgreementReport report = tc::agreement(solution.labels, reference.labels);
    json doc = json::parse(tc::to_json(report));
    std::cout << "fraction_matched\t" << tc::format_number(report.fraction_matched) << "\nkappa\t" << tc::format_number(report.kappa)
              << "\nrand\t" << tc::format_number(report.rand) << "\ncrand\t" << tc::format_number(report.crand) << '\n';
    if (!a.standard.empty()) {
        const auto standard = tc::load_labels(a.standard, a.standard_col, delimiter_for(a.standard));
        if (standard.labels.size() != reference.labels.size())
            throw tc::Error(tc::ErrorCode::LengthMismatch, "standard and reference differ in case count");
        const std::string codes = tc::failure_codes(reference.labels, solution.labels, standard.labels);
        std::map<char, std::size_t> counts{{'o', 0}, {'s', 0}, {'t', 0}, {'x', 0}};
        for (const char c : codes) ++counts[c];
        write_stream(out / "failures.tsv", [&](std::ostream& os) {
            os << "case\tcode\n";
            for (std::size_t i = 0; i < codes.size(); ++i) os << reference.row_ids[i] << '\t' << codes[i] << '\n';
        });
        doc["failures"] = {{"o", counts['o']}, {"s", counts['s']}, {"t", counts['t']}, {"x", counts['x']}};
        std::cout << "failures\to=" << counts['o'] << " s=" << counts['s'] << " t=" << counts['t'] << " x=" << counts['x'] << '\n';
    }
    tc::write_file(out / "agreement.json", doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_validate_null(const DataOptions& d, const MmccOptions& m, std::size_t k, std::size_t draws, std::size_t null_n, const fs::path& out) {
    const PreparedData prepared = prepare(d);
    const tc::MmccContext context(prepared.data.values(), m.base, m.predict);
    tc::MmccConfig cfg = to_config(m);
    cfg.k = k;

    tc::NullSimConfig null_cfg = tc::null_reference_from(prepared.data.values());
    null_cfg.draws = draws;
    null_cfg.n = null_n ? null_n : (m.resample_size ? m.resample_size : prepared.data.size());
    null_cfg.k = k;
    null_cfg.base = m.base;
    null_cfg.predictor = m.predict;
    null_cfg.seed = m.seed;
    null_cfg.threads = m.threads;

    const tc::CrispAssignment standard = tc::standard_solution(context, cfg);
    const tc::CrispAssignment truecluster = tc::mmcc_fit(context, cfg).majority;
    tc::MmccConfig draw_cfg = cfg;
    draw_cfg.seed = tc::derive_seed(m.seed, {31});
    const std::vector<std::pair<std::string, std::vector<double>>> distributions{
        {"null_pairs", tc::simulate_null_agreement(null_cfg)},
        {"resample_pairs", tc::resample_pair_agreement(context, draw_cfg, draws)},
        {"standard_reference", tc::reference_agreement(context, draw_cfg, draws, standard)},
        {"truecluster_reference", tc::reference_agreement(context, draw_cfg, draws, truecluster)},
    };
    std::cout << "distribution\tcount\tmin\tq1\tmedian\tq3\tmax\n";
    for (const auto& [name, values] : distributions) {
        write_stream(out / (name + ".tsv"), [&](std::ostream& os) { tc::write_distribution_tsv(os, "rand", values); });
        const tc::DistributionSummary s = tc::summarize(values);
        tc::write_file(out / (name + ".json"), tc::to_json(s));
        std::cout << name << '\t' << s.count << '\t' << tc::format_number(s.min) << '\t' << tc::format_number(s.q1) << '\t'
                  << tc::format_number(s.median) << '\t' << tc::format_number(s.q3) << '\t' << tc::format_number(s.max) << '\n';
    }
    json config{{"data", data_json(d)}, {"mmcc", mmcc_json(m, false)}, {"k", k}, {"draws", draws}, {"null_n", null_cfg.n}};
    write_manifest(out, "validate-null", config, prepared.input_digest, m.seed);
    return kExitOk;
}

int cmd_generate(const std::string& shape_name, std::size_t n, double noise, std::size_t clusters, std::uint64_t seed, const fs::path& file) {
    const auto shape = tc::parse_shape(shape_name);
    if (!shape) throw tc::Error(tc::ErrorCode::InvalidArgument, "unknown shape '" + shape_name + "'");
    const tc::GeneratedData g = tc::generate({*shape, n, noise, clusters, seed});
    std::ostringstream os;
    os << "id,x,y,label\n";
    for (std::size_t i = 0; i < n; ++i)
        os << (i + 1) << ',' << tc::format_number(g.points(i, 0)) << ',' << tc::format_number(g.points(i, 1)) << ',' << (g.labels.labels[i] + 1) << '\n';
    tc::write_file(file, os.str());
    return kExitOk;
}

int cmd_preprocess(const DataOptions& d, const fs::path& out) {
    const PreparedData prepared = prepare(d);
    write_preprocessing(out, prepared);
    write_manifest(out, "preprocess", json{{"data", data_json(d)}}, prepared.input_digest, 0);
    return kExitOk;
}

int exit_code_for(tc::ErrorCode code) {
    switch (code) {
        case tc::ErrorCode::ParseError:
        case tc::ErrorCode::NonFiniteValue:
        case tc::ErrorCode::DivisionByZero:
        case tc::ErrorCode::ConstantColumn:
        case tc::ErrorCode::DegenerateCovariance:
        case tc::ErrorCode::LengthMismatch:
        case tc::ErrorCode::UncoveredCase:
        case tc::ErrorCode::ZeroRowSum:
        case tc::ErrorCode::Io:
            return kExitData;
        case tc::ErrorCode::AllRoundsDegenerate:
            return kExitDegenerate;
        default:
            return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resample-aggregated clustering with CIC model selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", TRUECLUSTER_VERSION);

    DataOptions data;
    MmccOptions mmcc;
    std::string out = "truecluster-out";
    bool write_json = false;

    auto* sweep = app.add_subcommand("sweep", "Fit K = kmin..kmax and select the model with the highest CIC");
    add_data_options(sweep, data);
    add_mmcc_options(sweep, mmcc, true);
    sweep->add_option("--out", out, "Output directory")->capture_default_str();
    sweep->add_flag("--json", write_json, "Also write JSON probability, vote and CIC matrices");

    auto* silhouette = app.add_subcommand("silhouette", "Mean silhouette width of the full-sample base solution per K");
    add_data_options(silhouette, data);
    add_mmcc_options(silhouette, mmcc, true);
    silhouette->add_option("--out", out, "Output directory")->capture_default_str();

    AgreementOptions agree;
    auto* agreement = app.add_subcommand("agreement", "Agreement indices between two labelings");
    agreement->add_option("--solution", agree.solution, "Labeling to evaluate (TSV or CSV)")->required()->check(CLI::ExistingFile);
    agreement->add_option("--solution-col", agree.solution_col, "Label column of --solution")->capture_default_str();
    agreement->add_option("--reference", agree.reference, "Reference labeling, e.g. the data file with true classes")->required()->check(CLI::ExistingFile);
    agreement->add_option("--reference-col", agree.reference_col, "Label column of --reference")->capture_default_str();
    agreement->add_option("--standard", agree.standard, "Second labeling for per-case failure codes")->check(CLI::ExistingFile);
    agreement->add_option("--standard-col", agree.standard_col, "Label column of --standard")->capture_default_str();
    agreement->add_option("--out", out, "Output directory")->capture_default_str();

    std::size_t k = 4;
    std::size_t draws = 1001;
    std::size_t null_n = 0;
    auto* validate = app.add_subcommand("validate-null", "Null-distribution and resample agreement distributions");
    add_data_options(validate, data);
    add_mmcc_options(validate, mmcc, false);
    validate->add_option("--k", k, "Cluster count")->capture_default_str();
    validate->add_option("--draws", draws, "Successive samples per distribution")->capture_default_str();
    validate->add_option("--null-n", null_n, "Null sample size (default: resample size)");
    validate->add_option("--out", out, "Output directory")->capture_default_str();

    std::string shape = "blobs";
    std::size_t gen_n = 400;
    double noise = -1.0;
    std::size_t clusters = 2;
    std::uint64_t gen_seed = 1;
    std::string gen_file = "generated.csv";
    auto* generate = app.add_subcommand("generate", "Write an artificial dataset with known labels");
    generate->add_option("--shape", shape, "blobs|flipper4|elongated2|ring|spiral|modeclus3")
        ->check(CLI::IsMember({"blobs", "flipper4", "elongated2", "ring", "spiral", "modeclus3"}))
        ->capture_default_str();
    generate->add_option("--n", gen_n, "Number of cases")->capture_default_str();
    generate->add_option("--noise", noise, "Noise level (negative: shape default)")->capture_default_str();
    generate->add_option("--clusters", clusters, "Blob count for --shape blobs")->capture_default_str();
    generate->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    generate->add_option("--out", gen_file, "Output CSV file")->capture_default_str();

    auto* prep = app.add_subcommand("preprocess", "Write the transformed data matrix and fitted parameters");
    add_data_options(prep, data);
    prep->add_option("--out", out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    resolve(mmcc);
    try {
        if (*sweep) return cmd_sweep(data, mmcc, out, write_json);
        if (*silhouette) return cmd_silhouette(data, mmcc, out);
        if (*agreement) return cmd_agreement(agree, out);
        if (*validate) return cmd_validate_null(data, mmcc, k, draws, null_n, out);
        if (*generate) return cmd_generate(shape, gen_n, noise, clusters, gen_seed, gen_file);
        if (*prep) return cmd_preprocess(data, out);
    } catch (const tc::Error& e) {
        std::cerr << "error [" << tc::to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitConfig;
}
