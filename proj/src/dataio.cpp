#include "pplr/dataio.hpp"
#include "pplr/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace pplr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& text, double& value) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, value);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(value);
}

} // namespace

Dataset load_csv(const TableSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw LoadError("cannot open '" + spec.path + "'");

    std::string line;
    if (!std::getline(in, line)) throw LoadError(spec.path + ": empty file (no header)");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3); // UTF-8 BOM
    const std::vector<std::string> header = split(line);
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (!index.emplace(header[k], static_cast<int>(k)).second)
            throw LoadError(spec.path + ": duplicate column '" + header[k] + "'");
    }

    auto column = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) throw LoadError(spec.path + ": missing column '" + name + "'");
        return it->second;
    };
    const int ycol = column(spec.response_column);
    std::vector<std::string> predictors = spec.predictor_columns;
    if (predictors.empty()) {
        for (const auto& h : header)
            if (h != spec.response_column && !h.empty()) predictors.push_back(h);
    }
    if (predictors.empty()) throw LoadError(spec.path + ": no predictor columns");
    std::vector<int> xcols;
    for (const auto& name : predictors) {
        if (name == spec.response_column)
            throw LoadError(spec.path + ": response '" + name + "' also listed as a predictor");
        xcols.push_back(column(name));
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> ys;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line);
        auto cell = [&](int col, const std::string& name) {
            if (col >= static_cast<int>(cells.size()) || cells[static_cast<std::size_t>(col)].empty())
                throw LoadError(spec.path + ": missing value at line " + std::to_string(lineno) + ", column '" +
                                name + "'");
            double v = 0.0;
            if (!parse_double(cells[static_cast<std::size_t>(col)], v))
                throw LoadError(spec.path + ": cannot parse '" + cells[static_cast<std::size_t>(col)] +
                                "' at line " + std::to_string(lineno) + ", column '" + name + "'");
            return v;
        };
        std::vector<double> row;
        row.reserve(xcols.size());
        for (std::size_t k = 0; k < xcols.size(); ++k) row.push_back(cell(xcols[k], predictors[k]));
        ys.push_back(cell(ycol, spec.response_column));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw LoadError(spec.path + ": no data rows");

    Dataset data;
    data.family = spec.family;
    data.names = predictors;
    data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(predictors.size()));
    data.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < predictors.size(); ++k)
            data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        data.y[static_cast<Eigen::Index>(i)] = ys[i];
    }
    if (data.family == Family::BernoulliLogit) {
        for (Eigen::Index i = 0; i < data.y.size(); ++i)
            if (data.y[i] != 0.0 && data.y[i] != 1.0)
                throw LoadError(spec.path + ": logistic response must be 0/1 (data row " + std::to_string(i + 1) + ")");
    }
    return data;
}

Vector Standardization::original_slopes(const Vector& beta_std) const {
    return beta_std.cwiseQuotient(scales);
}

double Standardization::original_intercept(const Vector& beta_std) const {
    return y_mean - original_slopes(beta_std).dot(means);
}

Vector Standardization::predict(const Matrix& X_raw, const Vector& beta_std) const {
    return (X_raw * original_slopes(beta_std)).array() + original_intercept(beta_std);
}

Standardized standardize(const Dataset& data) {
    validate(data);
    const double n = static_cast<double>(data.n());
    Standardized out;
    out.data = data;
    out.transform.means = data.X.colwise().mean().transpose();
    out.transform.scales.resize(data.p());
    for (int j = 0; j < data.p(); ++j) {
        auto col = out.data.X.col(j);
        col.array() -= out.transform.means[j];
        const double ss = col.squaredNorm();
        if (!(ss > 0.0) || ss <= 1e-24 * n * (1.0 + out.transform.means[j] * out.transform.means[j]))
            throw ContractViolation("column '" + data.name(j) + "' has zero variance and cannot be standardized");
        const double scale = std::sqrt(ss / n);
        out.transform.scales[j] = scale;
        col /= scale;
    }
    if (data.family == Family::GaussianIdentity) {
        out.transform.y_mean = data.y.mean();
        out.data.y.array() -= out.transform.y_mean;
    }
    return out;
}

double r_squared(const Dataset& data, const Vector& beta) {
    const Vector resid = data.y - data.X * beta;
    const double tss = (data.y.array() - data.y.mean()).square().sum();
    require(tss > 0.0, "r_squared: response has zero variance");
    return 1.0 - resid.squaredNorm() / tss;
}

std::string default_prostate_path() { return std::string(PPLR_DATA_DIR) + "/prostate.csv"; }

TableSpec prostate_table(const std::string& path) {
    TableSpec t;
    t.path = path;
    t.response_column = "lpsa";
    t.predictor_columns = {"lcavol", "lweight", "age", "lbph", "svi", "lcp", "gleason", "pgg45"};
    t.family = Family::GaussianIdentity;
    return t;
}

ProstateReport prostate_analysis(const Dataset& raw, const PenaltySpec& penalty, const std::string& ppl_unpenalized,
                                 const TuneOptions& tune) {
    const Standardized std_data = standardize(raw);
    const Dataset& data = std_data.data;
    const int p = data.p();

    int svi = -1;
    for (int j = 0; j < p; ++j)
        if (data.name(j) == ppl_unpenalized) svi = j;
    require(svi >= 0, "prostate_analysis: no predictor named '" + ppl_unpenalized + "'");

    ProstateReport rep;
    rep.ppl_unpenalized = ppl_unpenalized;

    FitProblem ls;
    ls.penalty = PenaltySpec::none();
    ls.penalized.assign(static_cast<std::size_t>(p), false);
    const FitResult ls_fit = fit(data, ls, tune.solver);

    FitProblem pl;
    pl.penalty = penalty;
    pl.penalized.assign(static_cast<std::size_t>(p), true);
    const Selection pl_sel = tune_bic(data, pl, tune);

    FitProblem ppl;
    ppl.penalty = penalty;
    ppl.penalized = FitProblem::mask_except(p, {svi});
    const Selection ppl_sel = tune_bic(data, ppl, tune);

    rep.lambda_pl = pl_sel.lambda;
    rep.lambda_ppl = ppl_sel.lambda;
    rep.r2_ls = r_squared(data, ls_fit.beta);
    rep.r2_pl = r_squared(data, pl_sel.fit.beta);
    rep.r2_ppl = r_squared(data, ppl_sel.fit.beta);
    rep.converged = ls_fit.converged && pl_sel.fit.converged && ppl_sel.fit.converged;
    for (int j = 0; j < p; ++j)
        rep.coefficients.push_back({data.name(j), ls_fit.beta[j], pl_sel.fit.beta[j], ppl_sel.fit.beta[j]});

    TestOptions topts;
    topts.tune = tune;
    for (int j = 0; j < p; ++j) {
        const ZeroSubset h{{j}};
        const TestReport lr = olr_test(data, h, topts);
        const TestReport plr = plr_test(data, h, penalty, topts);
        const TestReport pplr = pplr_test(data, h, penalty, topts);
        rep.converged = rep.converged && lr.converged && plr.converged && pplr.converged;
        rep.p_values.push_back(
            {data.name(j), lr.p_value, plr.p_value, pplr.p_value, lr.statistic, plr.statistic, pplr.statistic});
    }
    return rep;
}

} // namespace pplr
