#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "support.hpp"
#include "truecluster/io.hpp"

using namespace truecluster;

TEST_SUITE("io") {
    TEST_CASE("number formatting") {
        CHECK(format_number(0.0) == "0");
        CHECK(format_number(0.5) == "0.5");
        CHECK(format_number(-2.0) == "-2");
        CHECK(format_number(std::nan("")) == "NaN");
        CHECK(format_number(std::numeric_limits<double>::infinity()) == "Inf");
        CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-Inf");
        Rng rng(1);
        for (int t = 0; t < 1000; ++t) {
            const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.uniform_index(40)) - 20.0);
            CHECK(std::stod(format_number(v)) == v);
        }
    }

    TEST_CASE("table layouts") {
        const ProbabilityMatrix p(Matrix<double>(2, 2, std::vector<double>{0.25, 0.75, 1, 0}));
        const std::vector<std::string> ids{"a", "b"};
        std::ostringstream probs, assign, trace;
        write_probabilities_tsv(probs, p, ids);
        CHECK(probs.str() == "case\tk1\tk2\na\t0.25\t0.75\nb\t1\t0\n");
        write_assignment_tsv(assign, CrispAssignment{{1, 0}, 2}, ids);
        CHECK(assign.str() == "case\tlabel\na\t2\nb\t1\n");
        const std::vector<double> t{std::nan(""), 0.5};
        write_trace_tsv(trace, t);
        CHECK(trace.str() == "round\tcic\n1\tNaN\n2\t0.5\n");
    }

    TEST_CASE("diagnostics rows sum the cellwise CIC") {
        Rng rng(2);
        const ProbabilityMatrix p = tctest::random_probs(rng, 5, 3);
        const cic::CicBreakdown b = cic::evaluate(p);
        const std::vector<std::string> ids{"1", "2", "3", "4", "5"};
        std::ostringstream out;
        write_diagnostics_tsv(out, argmax_assignment(p), b, ids);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "case\tmajority\tgsd\tcic");
        double total = 0.0;
        while (std::getline(in, line)) total += std::stod(line.substr(line.rfind('\t') + 1));
        CHECK(std::abs(total / 5.0 - b.cic) < 1e-12);
    }

    TEST_CASE("json documents parse") {
        const auto summary = nlohmann::json::parse(to_json(DistributionSummary{3, 0.1, 0.2, 0.3, 0.4, 0.5, 0.3}));
        CHECK(summary["median"].get<double>() == 0.3);
        const auto report = nlohmann::json::parse(to_json(AgreementReport{0.9, 0.8, 0.85, 0.7}));
        CHECK(report["crand"].get<double>() == 0.7);
        const ProbabilityMatrix p(Matrix<double>(2, 2, std::vector<double>{0.5, 0.5, 1, 0}));
        CHECK(nlohmann::json::parse(to_json(cic::evaluate(p))).contains("cic"));
    }

    TEST_CASE("files and digests") {
        const auto dir = std::filesystem::temp_directory_path() / "truecluster_io_test" / "nested";
        std::filesystem::remove_all(dir.parent_path());
        write_file(dir / "a.txt", "abc");
        CHECK(std::filesystem::exists(dir / "a.txt"));
        // FNV-1a 64 of "abc".
        CHECK(file_digest(dir / "a.txt") == "e71fa2190541574b");
        std::filesystem::remove_all(dir.parent_path());
    }
}
