#include "pplr/cli.hpp"

#include "pplr/dataio.hpp"
#include "pplr/error.hpp"
#include "pplr/inference.hpp"
#include "pplr/report.hpp"
#include "pplr/simulate.hpp"
#include "pplr/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace pplr {

namespace {

namespace fs = std::filesystem;

struct ModelFlags {
    std::string data;
    std::string response;
    std::vector<std::string> predictors;
    std::string family = "gaussian";
    std::string penalty = "scad";
    double a = 0.0; // 0 selects the family default
    std::vector<std::string> unpenalized;
    double lambda = 0.0;
    CLI::Option* lambda_opt = nullptr;
    std::string tune = "bic";
    std::string bic_loss = "loglik";
    int grid_size = 100;
    double grid_ratio = 1e-3;
    bool raw = false;
    std::string out = ".";
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
    app->add_option("--data", f.data, "CSV file with a header row")->required();
    app->add_option("--response", f.response, "response column")->required();
    app->add_option("--predictors", f.predictors, "comma-separated predictor columns (default: all others)")
        ->delimiter(',');
    app->add_option("--family", f.family, "gaussian or logistic")->capture_default_str();
    app->add_option("--penalty", f.penalty, "scad, mcp, lasso or none")->capture_default_str();
    app->add_option("--a", f.a, "penalty shape (default 3.7 for scad, 3 for mcp)");
    app->add_option("--unpenalized", f.unpenalized, "comma-separated coefficients left unpenalized")->delimiter(',');
    f.lambda_opt = app->add_option("--lambda", f.lambda, "fixed tuning parameter (skips tuning)");
    app->add_option("--tune", f.tune, "tuning rule when --lambda is absent")
        ->check(CLI::IsMember({"bic"}))
        ->capture_default_str();
    app->add_option("--bic-loss", f.bic_loss, "BIC fit term: loglik (-2L) or penalized (-2PQ)")
        ->check(CLI::IsMember({"penalized", "loglik"}))
        ->capture_default_str();
    app->add_option("--grid-size", f.grid_size, "number of lambda grid points")->capture_default_str();
    app->add_option("--grid-ratio", f.grid_ratio, "smallest grid lambda over lambda_max")->capture_default_str();
    app->add_flag("--raw", f.raw, "fit the columns as given instead of standardizing");
    app->add_option("--out", f.out, "output directory")->capture_default_str();
}

PenaltySpec make_penalty(const std::string& name, double a) {
    switch (penalty_family_from_string(name)) {
    case PenaltyFamily::Scad: return a > 0.0 ? PenaltySpec::scad(0.0, a) : PenaltySpec::scad(0.0);
    case PenaltyFamily::Mcp: return a > 0.0 ? PenaltySpec::mcp(0.0, a) : PenaltySpec::mcp(0.0);
    case PenaltyFamily::Lasso: return PenaltySpec::lasso(0.0);
    case PenaltyFamily::None: return PenaltySpec::none();
    }
    return PenaltySpec::none();
}

TuneOptions tune_options(const ModelFlags& f) {
    TuneOptions t;
    t.grid_size = f.grid_size;
    t.grid_ratio = f.grid_ratio;
    t.loss = f.bic_loss == "loglik" ? BicLoss::LogLikelihood : BicLoss::PenalizedObjective;
    return t;
}

Dataset load_model_data(const ModelFlags& f) {
    TableSpec spec;
    spec.path = f.data;
    spec.response_column = f.response;
    spec.predictor_columns = f.predictors;
    spec.family = family_from_string(f.family);
    Dataset raw = load_csv(spec);
    if (f.raw) return raw;
    return standardize(raw).data;
}

int index_of(const Dataset& data, const std::string& name) {
    const auto it = std::find(data.names.begin(), data.names.end(), name);
    require(it != data.names.end(), "unknown coefficient '" + name + "'");
    return static_cast<int>(it - data.names.begin());
}

IndexSet indices_of(const Dataset& data, const std::vector<std::string>& names) {
    IndexSet out;
    for (const auto& name : names) {
        const int j = index_of(data, name);
        require(std::find(out.begin(), out.end(), j) == out.end(), "coefficient '" + name + "' listed twice");
        out.push_back(j);
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw LoadError("cannot write " + path.string());
    os << text;
    if (!os) throw LoadError("failed writing " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json names_json(const Dataset& data, const IndexSet& idx) {
    nlohmann::json arr = nlohmann::json::array();
    for (int j : idx) arr.push_back(data.name(j));
    return arr;
}

void print_warnings(const FitResult& fit) {
    for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_fit(const ModelFlags& f) {
    const Dataset data = load_model_data(f);
    const IndexSet unpen = indices_of(data, f.unpenalized);
    FitProblem problem;
    problem.penalty = make_penalty(f.penalty, f.a);
    problem.penalized = FitProblem::mask_except(data.p(), unpen);

    FitResult result;
    if (f.lambda_opt->count() > 0) {
        problem.penalty = problem.penalty.with_lambda(f.lambda);
        result = fit(data, problem);
    } else {
        result = tune_bic(data, problem, tune_options(f)).fit;
    }
    print_warnings(result);

    std::ostringstream csv;
    csv << "name,estimate\n";
    for (int j = 0; j < data.p(); ++j) csv << data.name(j) << ',' << format_number(result.beta[j], 8) << '\n';
    write_text(fs::path(f.out) / "coefficients.csv", csv.str());

    nlohmann::json j = to_json(result, false);
    j["family"] = to_string(data.family);
    j["penalty"] = to_string(problem.penalty.family);
    j["unpenalized"] = names_json(data, unpen);
    j["standardized"] = !f.raw;
    j["n"] = data.n();
    j["p"] = data.p();
    write_json(fs::path(f.out) / "fit.json", j);
    return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_test(const ModelFlags& f, const std::vector<std::string>& tested_names, const std::string& method_name) {
    const TestMethod method = test_method_from_string(method_name);
    const Dataset data = load_model_data(f);
    const IndexSet tested = indices_of(data, tested_names);
    require(!tested.empty(), "--test needs at least one coefficient");

    TestOptions opts;
    opts.tune = tune_options(f);
    if (f.lambda_opt->count() > 0) opts.lambda = f.lambda;

    if (method == TestMethod::PPLR) {
        IndexSet unpen = indices_of(data, f.unpenalized);
        if (unpen.empty()) unpen = tested;
        for (int j : tested)
            require(std::find(unpen.begin(), unpen.end(), j) != unpen.end(),
                    "pplr: tested coefficient '" + data.name(j) + "' must be listed in --unpenalized");
        for (int j : unpen)
            if (std::find(tested.begin(), tested.end(), j) == tested.end()) opts.extra_unpenalized.push_back(j);
    } else if (!f.unpenalized.empty()) {
        std::cerr << "note: --unpenalized is ignored by " << to_string(method) << '\n';
    }

    const TestReport report = run_test(method, data, ZeroSubset{tested}, make_penalty(f.penalty, f.a), opts);
    print_warnings(report.full_fit);

    nlohmann::json j = to_json(report);
    j["tested"] = names_json(data, tested);
    j["full_fit"] = to_json(report.full_fit, false);
    j["null_fit"] = to_json(report.null_fit, false);
    write_json(fs::path(f.out) / "test.json", j);
    return report.converged ? kExitOk : kExitNotConverged;
}

int cmd_path(const ModelFlags& f) {
    const Dataset data = load_model_data(f);
    const IndexSet unpen = indices_of(data, f.unpenalized);
    FitProblem problem;
    problem.penalty = make_penalty(f.penalty, f.a);
    require(problem.penalty.family != PenaltyFamily::None, "path needs a penalty other than none");
    problem.penalized = FitProblem::mask_except(data.p(), unpen);
    require(static_cast<int>(unpen.size()) < data.p(), "path needs at least one penalized coefficient");

    const TuneOptions t = tune_options(f);
    const double lmax = lambda_max(data, problem, t.solver);
    require(lmax > 0.0, "lambda_max is zero: every penalized coefficient is already zero");
    const std::vector<double> grid = lambda_grid(lmax, t.grid_size, t.grid_ratio);
    const std::vector<FitResult> path = fit_path(data, problem, grid, t.solver);
    const Selection sel = select_bic(grid, path, data.n(), data.p(), t.loss);

    std::ostringstream csv;
    csv << "lambda,df,objective,loglik,bic,converged";
    for (int j = 0; j < data.p(); ++j) csv << ',' << data.name(j);
    csv << '\n';
    bool all_converged = true;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const FitResult& r = path[k];
        all_converged = all_converged && r.converged;
        csv << format_number(grid[k], 10) << ',' << r.df << ',' << format_number(r.objective, 8) << ','
            << format_number(r.loglik, 8) << ',' << format_number(sel.bic[k], 8) << ',' << (r.converged ? 1 : 0);
        for (int j = 0; j < data.p(); ++j) csv << ',' << format_number(r.beta[j], 8);
        csv << '\n';
    }
    write_text(fs::path(f.out) / "path.csv", csv.str());

    nlohmann::json j;
    j["lambda_max"] = lmax;
    j["grid_size"] = grid.size();
    j["selected_index"] = sel.index;
    j["selected_lambda"] = sel.lambda;
    j["selected_fit"] = to_json(sel.fit, false);
    j["unpenalized"] = names_json(data, unpen);
    write_json(fs::path(f.out) / "path.json", j);
    return all_converged ? kExitOk : kExitNotConverged;
}

struct SimFlags {
    int example = 1;
    int n = 100;
    int p = 11;
    std::vector<double> deltas{0.0};
    int reps = 200;
    std::uint64_t seed = 20240917;
    double alpha = 0.05;
    std::vector<std::string> methods{"ppl", "pl", "ol"};
    std::string bic_loss = "loglik";
    bool statistics = false;
    std::string out = ".";
};

int cmd_simulate(const SimFlags& f) {
    require(f.example == 1 || f.example == 2, "--example must be 1 (linear) or 2 (logistic)");
    require(!f.deltas.empty(), "--delta needs at least one value");
    std::set<Method> methods;
    for (const auto& m : f.methods) methods.insert(method_from_string(m));
    require(!methods.empty(), "--methods needs at least one method");

    StudyOptions opts;
    opts.threads = default_threads();
    opts.tune.loss = f.bic_loss == "loglik" ? BicLoss::LogLikelihood : BicLoss::PenalizedObjective;

    std::vector<SimReport> reports;
    nlohmann::json all = nlohmann::json::array();
    bool clean = true;
    for (double delta : f.deltas) {
        SimDesign design;
        design.example = f.example == 1 ? Example::LinearEx1 : Example::LogisticEx2;
        design.n = f.n;
        design.p = f.p;
        design.delta = delta;
        design.n_reps = f.reps;
        design.seed = f.seed;
        design.alpha = f.alpha;
        design.validate();
        reports.push_back(run_study(design, methods, opts));
        const SimReport& r = reports.back();
        clean = clean && r.failures == 0;
        for (const auto& m : r.methods) clean = clean && m.nonconverged == 0;
        all.push_back(to_json(r, f.statistics));
    }

    const fs::path out(f.out);
    std::ostringstream est, rej;
    write_estimation_csv(est, reports);
    write_rejection_csv(rej, reports);
    write_text(out / "estimation.csv", est.str());
    write_text(out / "rejection.csv", rej.str());

    // QQ data for the null cell when it was simulated, else the first delta.
    std::size_t qq_cell = 0;
    for (std::size_t k = 0; k < reports.size(); ++k)
        if (reports[k].design.delta == 0.0) {
            qq_cell = k;
            break;
        }
    for (const MethodReport& m : reports[qq_cell].methods) {
        std::string tag = test_name(m.method);
        std::transform(tag.begin(), tag.end(), tag.begin(), [](unsigned char c) { return std::tolower(c); });
        std::ostringstream qq;
        write_qq_csv(qq, m.qq);
        write_text(out / ("qq_" + tag + ".csv"), qq.str());
    }
    write_json(out / "simulate.json", nlohmann::json{{"studies", all}});
    return clean ? kExitOk : kExitNotConverged;
}

int cmd_prostate(const std::string& data_path, const std::string& penalty, const std::string& unpenalized,
                 const std::string& bic_loss, const std::string& out_dir) {
    const Dataset raw = load_csv(prostate_table(data_path));
    TuneOptions tune;
    tune.loss = bic_loss == "loglik" ? BicLoss::LogLikelihood : BicLoss::PenalizedObjective;
    const ProstateReport report = prostate_analysis(raw, make_penalty(penalty, 0.0), unpenalized, tune);

    const fs::path out(out_dir);
    std::ostringstream coef;
    coef << "name,LS,SCAD-PL,SCAD-PPL\n";
    for (const auto& r : report.coefficients)
        coef << r.name << ',' << format_number(r.ls, 4) << ',' << format_number(r.pl, 4) << ','
             << format_number(r.ppl, 4) << '\n';
    coef << "R2," << format_number(report.r2_ls, 4) << ',' << format_number(report.r2_pl, 4) << ','
         << format_number(report.r2_ppl, 4) << '\n';
    write_text(out / "coefficients.csv", coef.str());

    std::ostringstream pv;
    pv << "name,LR,SCAD-PLR,SCAD-PPLR\n";
    for (const auto& r : report.p_values)
        pv << r.name << ',' << format_number(r.lr, 4) << ',' << format_number(r.plr, 4) << ','
           << format_number(r.pplr, 4) << '\n';
    write_text(out / "p_values.csv", pv.str());

    write_json(out / "prostate.json", to_json(report));
    return report.converged ? kExitOk : kExitNotConverged;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Partial penalized likelihood fitting and testing"};
    app.require_subcommand(1);

    ModelFlags fit_flags;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a (partially) penalized GLM");
    add_model_flags(fit_cmd, fit_flags);

    ModelFlags test_flags;
    std::vector<std::string> tested;
    std::string method = "pplr";
    CLI::App* test_cmd = app.add_subcommand("test", "likelihood ratio test that the named coefficients are zero");
    add_model_flags(test_cmd, test_flags);
    test_cmd->add_option("--test", tested, "comma-separated coefficients under test")->required()->delimiter(',');
    test_cmd->add_option("--method", method, "pplr, plr or olr")->capture_default_str();

    ModelFlags path_flags;
    CLI::App* path_cmd = app.add_subcommand("path", "solution path over the lambda grid with BIC values");
    add_model_flags(path_cmd, path_flags);

    SimFlags sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo study of estimation and testing");
    sim_cmd->add_option("--example", sim.example, "1 = linear, 2 = logistic")->capture_default_str();
    sim_cmd->add_option("--n", sim.n, "sample size")->capture_default_str();
    sim_cmd->add_option("--p", sim.p, "number of covariates")->capture_default_str();
    sim_cmd->add_option("--delta", sim.deltas, "comma-separated local alternatives")->delimiter(',');
    sim_cmd->add_option("--reps", sim.reps, "replicates per delta")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "master seed")->capture_default_str();
    sim_cmd->add_option("--alpha", sim.alpha, "test level")->capture_default_str();
    sim_cmd->add_option("--methods", sim.methods, "subset of ppl,pl,ol")->delimiter(',');
    sim_cmd->add_option("--bic-loss", sim.bic_loss, "BIC fit term: loglik or penalized")
        ->check(CLI::IsMember({"penalized", "loglik"}))
        ->capture_default_str();
    sim_cmd->add_flag("--statistics", sim.statistics, "include per-replicate statistics in simulate.json");
    sim_cmd->add_option("--out", sim.out, "output directory")->capture_default_str();

    std::string pros_data = default_prostate_path();
    std::string pros_penalty = "scad";
    std::string pros_unpen = "svi";
    std::string pros_loss = "loglik";
    std::string pros_out = ".";
    CLI::App* pros_cmd = app.add_subcommand("prostate", "coefficient and p-value tables for the prostate data");
    pros_cmd->add_option("--data", pros_data, "prostate CSV")->capture_default_str();
    pros_cmd->add_option("--penalty", pros_penalty, "scad, mcp or lasso")->capture_default_str();
    pros_cmd->add_option("--unpenalized", pros_unpen, "predictor left unpenalized in the PPL fit")
        ->capture_default_str();
    pros_cmd->add_option("--bic-loss", pros_loss, "BIC fit term: loglik or penalized")
        ->check(CLI::IsMember({"penalized", "loglik"}))
        ->capture_default_str();
    pros_cmd->add_option("--out", pros_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_flags);
        if (*test_cmd) return cmd_test(test_flags, tested, method);
        if (*path_cmd) return cmd_path(path_flags);
        if (*sim_cmd) return cmd_simulate(sim);
        if (*pros_cmd) return cmd_prostate(pros_data, pros_penalty, pros_unpen, pros_loss, pros_out);
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FitError& e) {
        std::cerr << "fit failed: " << e.what() << '\n';
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("pplr");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace pplr
