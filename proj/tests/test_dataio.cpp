#include "helpers.hpp"

#include "pplr/dataio.hpp"
#include "pplr/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace pplr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("pplr_dataio_" + std::to_string(std::random_device{}()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_csv(const std::string& name, const std::string& body) {
    const fs::path path = scratch_dir() / name;
    std::ofstream(path, std::ios::binary) << body;
    return path.string();
}

TableSpec spec_for(const std::string& path, const std::string& response, std::vector<std::string> preds = {}) {
    TableSpec s;
    s.path = path;
    s.response_column = response;
    s.predictor_columns = std::move(preds);
    return s;
}

std::string error_of(const TableSpec& s) {
    try {
        load_csv(s);
    } catch (const LoadError& e) {
        return e.what();
    }
    return "";
}

// Synthetic table with the prostate column layout, for plumbing tests only.
std::string synthetic_prostate_csv(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::string out = "lcavol,lweight,age,lbph,svi,lcp,gleason,pgg45,lpsa\n";
    for (int i = 0; i < 97; ++i) {
        double x[8];
        for (double& v : x) v = z(rng);
        x[4] = x[4] > 0.8 ? 1.0 : 0.0;
        const double y = 0.7 * x[0] + 0.3 * x[1] + 0.6 * x[4] + 0.5 * z(rng);
        for (double v : x) out += std::to_string(v) + ",";
        out += std::to_string(y) + "\n";
    }
    return out;
}

} // namespace

TEST_CASE("load a table with selected predictors in declared order") {
    const auto path = write_csv("basic.csv", "a,b,y,c\n1,2,3,4\n5,6,7,8\n9,10,11,12\n");
    const Dataset d = load_csv(spec_for(path, "y", {"c", "a"}));
    CHECK(d.n() == 3);
    CHECK(d.p() == 2);
    CHECK(d.names == std::vector<std::string>{"c", "a"});
    CHECK(d.X(1, 0) == 8.0);
    CHECK(d.X(2, 1) == 9.0);
    CHECK(d.y[2] == 11.0);

    const Dataset all = load_csv(spec_for(path, "y"));
    CHECK(all.names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("byte-order mark, CRLF and surrounding blanks are tolerated") {
    const auto path = write_csv("bom.csv", "\xEF\xBB\xBFx,y\r\n 1.5 ,2\r\n-3e-1,4\r\n");
    const Dataset d = load_csv(spec_for(path, "y"));
    CHECK(d.names == std::vector<std::string>{"x"});
    CHECK(d.X(0, 0) == 1.5);
    CHECK(d.X(1, 0) == doctest::Approx(-0.3));
}

TEST_CASE("load errors name the problem and location") {
    CHECK(error_of(spec_for((scratch_dir() / "nope.csv").string(), "y")).find("cannot open") != std::string::npos);
    CHECK(error_of(spec_for(write_csv("e1.csv", "a,y\n1,2\n"), "y", {"b"})).find("missing column 'b'") !=
          std::string::npos);
    const std::string miss = error_of(spec_for(write_csv("e2.csv", "a,y\n1,2\n,3\n"), "y"));
    CHECK(miss.find("missing value") != std::string::npos);
    CHECK(miss.find("line 3") != std::string::npos);
    CHECK(miss.find("'a'") != std::string::npos);
    const std::string bad = error_of(spec_for(write_csv("e3.csv", "a,y\n1,2\n1,x2\n"), "y"));
    CHECK(bad.find("cannot parse 'x2'") != std::string::npos);
    CHECK(error_of(spec_for(write_csv("e4.csv", "a,a,y\n1,2,3\n"), "y")).find("duplicate") != std::string::npos);
    CHECK(error_of(spec_for(write_csv("e5.csv", "a,y\n"), "y")).find("no data rows") != std::string::npos);
    CHECK(error_of(spec_for(write_csv("e6.csv", "a,y\n1,2\n"), "y", {"a", "y"})).find("also listed") !=
          std::string::npos);
    TableSpec logit = spec_for(write_csv("e7.csv", "a,y\n1,2\n"), "y");
    logit.family = Family::BernoulliLogit;
    CHECK(error_of(logit).find("0/1") != std::string::npos);
}

TEST_CASE("standardization: centered, sum of squares n, response centered") {
    std::mt19937_64 rng(3);
    Dataset raw;
    raw.X = pplr::testing::normal_matrix(40, 3, rng) * 5.0;
    raw.X.col(1).array() += 10.0;
    raw.y = Vector::LinSpaced(40, 1.0, 5.0);
    raw.names = {"u", "v", "w"};
    const Standardized s = standardize(raw);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(s.data.X.col(j).mean()) < 1e-12);
        CHECK(s.data.X.col(j).squaredNorm() == doctest::Approx(40.0));
    }
    CHECK(std::abs(s.data.y.mean()) < 1e-12);
    CHECK(s.transform.y_mean == doctest::Approx(3.0));
    CHECK(s.data.names == raw.names);

    raw.X.col(2).setConstant(4.0);
    try {
        standardize(raw);
        FAIL("expected a zero-variance error");
    } catch (const ContractViolation& e) {
        CHECK(std::string(e.what()).find("'w'") != std::string::npos);
    }
}

TEST_CASE("coefficients map back to the least-squares fit with intercept") {
    std::mt19937_64 rng(8);
    Dataset raw;
    raw.X = pplr::testing::normal_matrix(60, 3, rng) * 2.0;
    raw.X.col(0).array() += 7.0;
    std::normal_distribution<double> z(0.0, 1.0);
    raw.y.resize(60);
    for (int i = 0; i < 60; ++i) raw.y[i] = 1.0 + raw.X(i, 0) - 0.5 * raw.X(i, 2) + z(rng);

    const Standardized s = standardize(raw);
    const Vector b_std = s.data.X.colPivHouseholderQr().solve(s.data.y);

    Matrix Z(60, 4);
    Z.col(0).setOnes();
    Z.rightCols(3) = raw.X;
    const Vector full = Z.colPivHouseholderQr().solve(raw.y);
    CHECK((s.transform.original_slopes(b_std) - full.tail(3)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(s.transform.original_intercept(b_std) == doctest::Approx(full[0]));
    CHECK((s.transform.predict(raw.X, b_std) - Z * full).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("R squared") {
    const Dataset d = pplr::testing::gaussian_data(50, 3, Vector::Ones(3), 4);
    const Vector b = d.X.colPivHouseholderQr().solve(d.y);
    const double rss = (d.y - d.X * b).squaredNorm();
    const double tss = (d.y.array() - d.y.mean()).matrix().squaredNorm();
    CHECK(r_squared(d, b) == doctest::Approx(1.0 - rss / tss));
    CHECK(r_squared(d, Vector::Zero(3)) == doctest::Approx(1.0 - d.y.squaredNorm() / tss));
}

TEST_CASE("prostate table layout") {
    const TableSpec t = prostate_table("x.csv");
    CHECK(t.response_column == "lpsa");
    CHECK(t.predictor_columns ==
          std::vector<std::string>{"lcavol", "lweight", "age", "lbph", "svi", "lcp", "gleason", "pgg45"});
    CHECK(t.family == Family::GaussianIdentity);
    CHECK(default_prostate_path().find("prostate.csv") != std::string::npos);
}

TEST_CASE("prostate workflow on a synthetic table with the same layout") {
    const auto path = write_csv("synthetic_prostate.csv", synthetic_prostate_csv(21));
    const Dataset raw = load_csv(prostate_table(path));
    const ProstateReport r = prostate_analysis(raw, PenaltySpec::scad(0.0));
    REQUIRE(r.coefficients.size() == 8);
    REQUIRE(r.p_values.size() == 8);
    CHECK(r.ppl_unpenalized == "svi");
    CHECK(r.coefficients[4].ppl != 0.0);

    const Standardized s = standardize(raw);
    const Vector ls = s.data.X.colPivHouseholderQr().solve(s.data.y);
    for (int j = 0; j < 8; ++j) CHECK(r.coefficients[j].ls == doctest::Approx(ls[j]).epsilon(1e-8));
    CHECK(r.r2_ls == doctest::Approx(r_squared(s.data, ls)));
    CHECK(r.r2_ls >= r.r2_ppl - 1e-12);
    CHECK(r.r2_ls >= r.r2_pl - 1e-12);
    for (const auto& row : r.p_values) {
        CHECK(row.pplr >= 0.0);
        CHECK(row.pplr <= 1.0);
    }
    CHECK(r.p_values[0].pplr < 0.05);
    CHECK_THROWS_AS(prostate_analysis(raw, PenaltySpec::scad(0.0), "nothere"), ContractViolation);
}
