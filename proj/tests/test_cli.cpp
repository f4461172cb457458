#include "helpers.hpp"

#include "pplr/cli.hpp"
#include "pplr/dataio.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace pplr;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("pplr_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// y depends on a and b; c and d are noise; z is identically zero.
std::string make_table() {
    static const std::string path = [] {
        std::mt19937_64 rng(123);
        std::normal_distribution<double> n(0.0, 1.0);
        const fs::path p = work_dir() / "table.csv";
        std::ofstream out(p);
        out << "a,b,c,d,z,y\n";
        for (int i = 0; i < 120; ++i) {
            const double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
            out << a << ',' << b << ',' << c << ',' << d << ",0," << 2.0 * a - b + 0.5 + n(rng) << '\n';
        }
        return p.string();
    }();
    return path;
}

std::map<std::string, double> read_coefficients(const fs::path& p) {
    std::map<std::string, double> out;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        out[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
    }
    return out;
}

Dataset standardized_table(std::vector<std::string> preds) {
    TableSpec s;
    s.path = make_table();
    s.response_column = "y";
    s.predictor_columns = std::move(preds);
    return standardize(load_csv(s)).data;
}

} // namespace

TEST_CASE("fit with no penalty reproduces least squares on the standardized scale") {
    const fs::path out = work_dir() / "ls";
    CHECK(run_cli({"fit", "--data", make_table(), "--response", "y", "--predictors", "a,b,c,d", "--penalty", "none",
                   "--out", out.string()}) == kExitOk);
    const Dataset d = standardized_table({"a", "b", "c", "d"});
    const Vector ls = d.X.colPivHouseholderQr().solve(d.y);
    const auto coef = read_coefficients(out / "coefficients.csv");
    CHECK(coef.at("a") == doctest::Approx(ls[0]).epsilon(1e-6));
    CHECK(coef.at("d") == doctest::Approx(ls[3]).epsilon(1e-6));
    const auto j = read_json(out / "fit.json");
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("df").get<int>() == 4);
}

TEST_CASE("a dominant lambda zeroes every penalized coefficient") {
    const fs::path out = work_dir() / "big";
    CHECK(run_cli({"fit", "--data", make_table(), "--response", "y", "--predictors", "a,b,c,d", "--unpenalized", "b",
                   "--lambda", "1e9", "--out", out.string()}) == kExitOk);
    const auto coef = read_coefficients(out / "coefficients.csv");
    CHECK(coef.at("a") == 0.0);
    CHECK(coef.at("c") == 0.0);
    CHECK(coef.at("b") != 0.0);
}

TEST_CASE("BIC-tuned fit keeps the signal") {
    const fs::path out = work_dir() / "bic";
    CHECK(run_cli({"fit", "--data", make_table(), "--response", "y", "--predictors", "a,b,c,d", "--penalty", "mcp",
                   "--out", out.string()}) == kExitOk);
    const auto coef = read_coefficients(out / "coefficients.csv");
    CHECK(coef.at("a") > 0.5);
    CHECK(coef.at("b") < -0.3);
    CHECK(read_json(out / "fit.json").at("penalty") == "mcp");
}

TEST_CASE("olr test equals the residual sum of squares difference") {
    const fs::path out = work_dir() / "olr";
    CHECK(run_cli({"test", "--data", make_table(), "--response", "y", "--predictors", "a,b,c,d", "--test", "c,d",
                   "--method", "olr", "--out", out.string()}) == kExitOk);
    const Dataset d = standardized_table({"a", "b", "c", "d"});
    auto rss = [&](const Matrix& X) { return (d.y - X * X.colPivHouseholderQr().solve(d.y)).squaredNorm(); };
    const double closed = rss(d.X.leftCols(2)) - rss(d.X);
    const auto j = read_json(out / "test.json");
    CHECK(j.at("statistic").get<double>() == doctest::Approx(closed).epsilon(1e-6));
    CHECK(j.at("df").get<int>() == 2);
    CHECK(j.at("method") == "olr");
}

TEST_CASE("pplr test of a real effect and of an all-zero column") {
    const fs::path out = work_dir() / "pplr";
    CHECK(run_cli({"test", "--data", make_table(), "--response", "y", "--predictors", "a,b,c,d", "--test", "b",
                   "--out", out.string()}) == kExitOk);
    const auto j = read_json(out / "test.json");
    CHECK(j.at("p_value").get<double>() < 1e-6);
    CHECK(j.at("lambda_used").get<double>() > 0.0);

    const fs::path zero = work_dir() / "zero";
    CHECK(run_cli({"test", "--data", make_table(), "--response", "y", "--predictors", "a,b,z", "--raw", "--test",
                   "z", "--unpenalized", "z", "--out", zero.string()}) == kExitOk);
    const auto z = read_json(zero / "test.json");
    CHECK(z.at("statistic").get<double>() == doctest::Approx(0.0));
    CHECK(z.at("p_value").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("usage and data errors exit with code 2") {
    const std::string t = make_table();
    const std::string out = (work_dir() / "err").string();
    CHECK(run_cli({"test", "--data", t, "--response", "y", "--test", "a", "--unpenalized", "b", "--out", out}) ==
          kExitUsage);
    CHECK(run_cli({"fit", "--data", t, "--response", "y", "--unpenalized", "nosuch", "--out", out}) == kExitUsage);
    CHECK(run_cli({"fit", "--data", (work_dir() / "missing.csv").string(), "--response", "y"}) == kExitUsage);
    CHECK(run_cli({"fit", "--data", t, "--response", "y", "--predictors", "a,z", "--out", out}) == kExitUsage);
    CHECK(run_cli({"fit", "--data", t, "--response", "y", "--penalty", "ridge", "--out", out}) == kExitUsage);
    CHECK(run_cli({"fit", "--response", "y"}) == kExitUsage);
    CHECK(run_cli({"bogus"}) == kExitUsage);
    CHECK(run_cli({"simulate", "--example", "3", "--out", out}) == kExitUsage);
    CHECK(run_cli({"simulate", "--n", "10", "--p", "11", "--out", out}) == kExitUsage);
}

TEST_CASE("non-convergence exits with code 3") {
    const fs::path out = work_dir() / "nc";
    // an iteration cap is not exposed, so use a problem that cannot have an MLE
    std::ofstream(work_dir() / "sep.csv") << "x,w,y\n-2,1,0\n-1,0.3,0\n-0.5,-1,0\n0.5,2,1\n1,-0.4,1\n2,0.1,1\n";
    CHECK(run_cli({"test", "--data", (work_dir() / "sep.csv").string(), "--response", "y", "--family", "logistic",
                   "--test", "w", "--method", "olr", "--out", out.string()}) == kExitNotConverged);
}

TEST_CASE("path writes one row per grid point") {
    const fs::path out = work_dir() / "path";
    CHECK(run_cli({"path", "--data", make_table(), "--response", "y", "--predictors", "a,b,c,d", "--grid-size", "25",
                   "--out", out.string()}) == kExitOk);
    std::istringstream in(slurp(out / "path.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 25);
    const auto j = read_json(out / "path.json");
    CHECK(j.at("grid_size").get<int>() == 25);
    CHECK(j.at("selected_fit").at("df").get<int>() >= 2);
}

TEST_CASE("simulate with one replicate drops the sd columns") {
    const fs::path out = work_dir() / "sim1";
    CHECK(run_cli({"simulate", "--reps", "1", "--out", out.string()}) == kExitOk);
    const std::string est = slurp(out / "estimation.csv");
    CHECK(est.find("_sd") == std::string::npos);
    CHECK(est.find("PPL_L2_mean") != std::string::npos);
    for (const char* f : {"rejection.csv", "qq_pplr.csv", "qq_plr.csv", "qq_lr.csv", "simulate.json"})
        CHECK(fs::exists(out / f));
}

TEST_CASE("simulate output is byte-identical across runs and thread counts") {
    const std::vector<std::string> files{"estimation.csv", "rejection.csv", "qq_pplr.csv", "simulate.json"};
    auto run = [&](const std::string& tag, const char* threads) {
        setenv("PPLR_THREADS", threads, 1);
        const fs::path out = work_dir() / tag;
        REQUIRE(run_cli({"simulate", "--reps", "16", "--delta", "0,1.5", "--seed", "7", "--out", out.string()}) ==
                kExitOk);
        unsetenv("PPLR_THREADS");
        return out;
    };
    const fs::path a = run("det_a", "1"), b = run("det_b", "1"), c = run("det_c", "4");
    for (const auto& f : files) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(c / f));
    }
}
