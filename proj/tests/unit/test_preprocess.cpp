#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "support.hpp"
#include "truecluster/error.hpp"
#include "truecluster/io.hpp"
#include "truecluster/preprocess.hpp"

using namespace truecluster;

namespace {

const char* const kCrabs = TRUECLUSTER_DATA_DIR "/crabs.csv";

LoadedData crabs() {
    CsvOptions opt;
    opt.id_column = "id";
    opt.label_column = "class";
    opt.columns = {"FL", "RW", "CL", "CW", "BD"};
    return load_csv(kCrabs, opt);
}

Matrix<double> correlation(const Matrix<double>& x) {
    const std::size_t n = x.rows(), m = x.cols();
    std::vector<double> mean(m, 0.0), sd(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) mean[j] += x(i, j) / static_cast<double>(n);
    Matrix<double> c(m, m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) c(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
    for (std::size_t a = 0; a < m; ++a) sd[a] = std::sqrt(c(a, a));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) c(a, b) /= sd[a] * sd[b];
    return c;
}

Matrix<double> covariance(const Matrix<double>& x) {
    const std::size_t n = x.rows(), m = x.cols();
    std::vector<double> mean(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) mean[j] += x(i, j) / static_cast<double>(n);
    Matrix<double> c(m, m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) c(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]) / static_cast<double>(n - 1);
    return c;
}

void check_identity(const Matrix<double>& c, double tol) {
    for (std::size_t a = 0; a < c.rows(); ++a)
        for (std::size_t b = 0; b < c.cols(); ++b) CHECK(std::abs(c(a, b) - (a == b ? 1.0 : 0.0)) < tol);
}

LoadedData parse(const std::string& text, const CsvOptions& opt = {}) {
    std::istringstream in(text);
    return read_csv(in, opt);
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("preprocess") {
    TEST_CASE("crab file loads as 200 by 5 with four classes") {
        const LoadedData d = crabs();
        CHECK(d.data.size() == 200);
        CHECK(d.data.dims() == 5);
        REQUIRE(d.labels.has_value());
        CHECK(d.labels->k == 4);
        CHECK(d.labels->occupied() == 4);
        CHECK(d.label_levels == std::vector<std::string>{"BM", "BF", "OM", "OF"});
        CHECK(d.data.row_ids().front() == "1");
        CHECK(d.data.column_names() == std::vector<std::string>{"FL", "RW", "CL", "CW", "BD"});
        CHECK(d.data.values()(0, 0) == 8.1);
    }

    TEST_CASE("reader errors") {
        CHECK(code_of([] { parse(""); }) == ErrorCode::ParseError);
        CHECK(code_of([] { parse("a,b\n1,NaN\n2,3\n"); }) == ErrorCode::NonFiniteValue);
        CHECK(code_of([] { parse("a,b\n1,Inf\n2,3\n"); }) == ErrorCode::NonFiniteValue);
        CHECK(code_of([] { parse("a,b\n1,2\n3\n"); }) == ErrorCode::ParseError);
        try {
            parse("a,b\n1,2\n3,x\n");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(e.index() == std::optional<std::size_t>(3));
        }
        CsvOptions opt;
        opt.columns = {"zz"};
        CHECK_THROWS_AS(parse("a,b\n1,2\n3,4\n", opt), Error);
    }

    TEST_CASE("quoted fields and line endings") {
        CsvOptions opt;
        opt.label_column = "name";
        const LoadedData d = parse("\"name\",x\r\n\"a, \"\"b\"\"\",1.5\r\n\"multi\nline\",2\r\n", opt);
        CHECK(d.data.size() == 2);
        CHECK(d.label_levels == std::vector<std::string>{"a, \"b\"", "multi\nline"});
        CHECK(d.data.values()(1, 0) == 2.0);
    }

    TEST_CASE("label files") {
        const LabelColumn c = load_labels(kCrabs, "sp", ',', "id");
        CHECK(c.labels.size() == 200);
        CHECK(c.levels == std::vector<std::string>{"B", "O"});
        CHECK(c.row_ids[199] == "200");
    }

    TEST_CASE("ratio transform") {
        const Dataset d(Matrix<double>(2, 2, std::vector<double>{10, 20, 3, 4}), {}, {"FL", "CW"});
        const Dataset r = ratio_transform(d, 1);
        CHECK(r.values()(0, 0) == 0.5);
        CHECK(r.values()(0, 1) == 20);
        CHECK(r.values()(1, 0) == 0.75);
        CHECK(r.column_names() == std::vector<std::string>{"FL/CW", "CW"});
        const Dataset z(Matrix<double>(2, 2, std::vector<double>{1, 2, 3, 0}));
        try {
            ratio_transform(z, 1);
            FAIL("expected DivisionByZero");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DivisionByZero);
            CHECK(e.index() == std::optional<std::size_t>(1));
        }
        const LoadedData c = crabs();
        const Dataset cr = ratio_transform(c.data, column_index(c.data, "CW"));
        CHECK(cr.size() == 200);
        CHECK(cr.dims() == 5);
        CHECK_THROWS_AS(column_index(c.data, "XX"), Error);
    }

    TEST_CASE("sphering whitens random full-rank data") {
        Rng rng(1);
        for (int t = 0; t < 20; ++t) {
            const std::size_t m = 2 + rng.uniform_index(5);
            Matrix<double> x = tctest::random_points(rng, 50 + rng.uniform_index(100), m);
            // Mix the columns so the input is correlated and unequally scaled.
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 1; j < m; ++j) x(i, j) = 3.0 * x(i, j) + 0.8 * x(i, j - 1) + 5.0;
            const SphereResult s = sphere(Dataset(x));
            CHECK(s.data.dims() == m);
            CHECK(s.warnings.empty());
            check_identity(covariance(s.data.values()), 1e-8);
        }
    }

    TEST_CASE("sphering white data only rotates it") {
        Rng rng(2);
        Matrix<double> x = tctest::random_points(rng, 80, 3);
        x = sphere(Dataset(x)).data.values();
        const SphereResult again = sphere(Dataset(x));
        check_identity(covariance(again.data.values()), 1e-8);
        // Orthogonal map: pairwise distances are preserved.
        for (std::size_t i = 0; i < 10; ++i)
            CHECK(std::abs(squared_distance(x.row(i), x.row(i + 1)) - squared_distance(again.data.row(i), again.data.row(i + 1))) < 1e-8);
    }

    TEST_CASE("perfectly correlated columns keep one component") {
        Matrix<double> x(20, 2);
        for (std::size_t i = 0; i < 20; ++i) {
            x(i, 0) = static_cast<double>(i * i % 7);
            x(i, 1) = 2.0 * x(i, 0) + 1.0;
        }
        const SphereResult s = sphere(Dataset(x));
        CHECK(s.data.dims() == 1);
        CHECK(s.params.dropped == 1);
        CHECK(s.warnings.size() == 1);
    }

    TEST_CASE("constant columns are rejected") {
        Matrix<double> x(5, 2, 1.0);
        for (std::size_t i = 0; i < 5; ++i) x(i, 0) = static_cast<double>(i);
        CHECK(code_of([&] { sphere(Dataset(x)); }) == ErrorCode::ConstantColumn);
        CHECK(code_of([&] { standardize(Dataset(x)); }) == ErrorCode::ConstantColumn);
    }

    TEST_CASE("crab ratios sphere to five uncorrelated components") {
        const LoadedData c = crabs();
        const Dataset r = ratio_transform(c.data, column_index(c.data, "CW"));
        const SphereResult s = sphere(r);
        CHECK(s.data.dims() == 5);
        check_identity(correlation(s.data.values()), 1e-8);
        // Eigenvalues against a direct decomposition of the correlation matrix.
        const Matrix<double> corr = correlation(r.values());
        Eigen::MatrixXd e(5, 5);
        for (std::size_t a = 0; a < 5; ++a)
            for (std::size_t b = 0; b < 5; ++b) e(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = corr(a, b);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(std::abs(s.params.eigenvalues[j] - solver.eigenvalues()(static_cast<Eigen::Index>(4 - j))) < 1e-10);
        for (std::size_t j = 0; j + 1 < 5; ++j) CHECK(s.params.eigenvalues[j] >= s.params.eigenvalues[j + 1]);
        // Sign convention: the largest-magnitude loading of each component is positive.
        for (std::size_t comp = 0; comp < 5; ++comp) {
            double best = 0.0;
            for (std::size_t j = 0; j < 5; ++j)
                if (std::abs(s.params.eigenvectors(j, comp)) > std::abs(best)) best = s.params.eigenvectors(j, comp);
            CHECK(best > 0.0);
        }
        CHECK(s.data.column_names().front() == "PC1");
    }

    TEST_CASE("fitted sphere parameters project the training rows identically") {
        Rng rng(3);
        const Matrix<double> x = tctest::random_points(rng, 40, 3);
        const SphereResult s = sphere(Dataset(x));
        CHECK(apply_sphere(s.params, x) == s.data.values());
        CHECK_THROWS_AS(apply_sphere(s.params, Matrix<double>(2, 2, 1.0)), Error);
    }

    TEST_CASE("rotation without whitening keeps component variances") {
        Rng rng(4);
        const Matrix<double> x = tctest::random_points(rng, 60, 3);
        const SphereResult s = sphere(Dataset(x), false);
        const Matrix<double> c = covariance(s.data.values());
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(c(j, j) - s.params.eigenvalues[j]) < 1e-8);
    }

    TEST_CASE("keep components truncates") {
        Rng rng(5);
        const SphereResult s = sphere(Dataset(tctest::random_points(rng, 30, 4)), true, 2);
        CHECK(s.data.dims() == 2);
    }

    TEST_CASE("standardize gives zero mean and unit variance") {
        Rng rng(6);
        const Dataset d = standardize(Dataset(tctest::random_points(rng, 30, 3, 7.0)));
        const Matrix<double> c = covariance(d.values());
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(c(j, j) - 1.0) < 1e-12);
    }

    TEST_CASE("pipeline is deterministic") {
        const LoadedData c = crabs();
        PreprocessSpec spec;
        spec.ratio_column = "CW";
        spec.sphere = true;
        const PreprocessResult a = preprocess(c.data, spec), b = preprocess(c.data, spec);
        CHECK(a.data.values() == b.data.values());
        REQUIRE(a.sphere.has_value());
        CHECK(a.sphere->eigenvectors == b.sphere->eigenvectors);
    }

    TEST_CASE("write then read reproduces every value exactly") {
        Rng rng(7);
        Matrix<double> x = tctest::random_points(rng, 30, 4, 1e3);
        x(0, 0) = 1e-300;
        x(1, 1) = -0.1;
        x(2, 2) = 123456789.123456789;
        const Dataset d(x);
        std::ostringstream out;
        write_dataset_tsv(out, d);
        CsvOptions opt;
        opt.delimiter = '\t';
        opt.id_column = "case";
        std::istringstream in(out.str());
        const LoadedData back = read_csv(in, opt);
        CHECK(back.data.values() == x);
        CHECK(back.data.row_ids() == d.row_ids());
    }
}
