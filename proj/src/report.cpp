#include "pplr/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

namespace pplr {

std::string format_number(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s(buf);
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s[0] == '-' ? 1 : 0);
    return s;
}

nlohmann::json to_json(const FitResult& fit, bool include_beta) {
    nlohmann::json j;
    j["objective"] = fit.objective;
    j["df"] = fit.df;
    j["lambda"] = fit.lambda;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    if (include_beta) j["beta"] = std::vector<double>(fit.beta.data(), fit.beta.data() + fit.beta.size());
    if (!fit.warnings.empty()) j["warnings"] = fit.warnings;
    return j;
}

nlohmann::json to_json(const TestReport& report) {
    nlohmann::json j;
    j["method"] = to_string(report.method);
    j["statistic"] = report.statistic;
    j["df"] = report.df;
    j["p_value"] = report.p_value;
    j["lambda_used"] = report.lambda_used;
    j["converged"] = report.converged;
    return j;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
    nlohmann::json j;
    j["mean"] = s.mean;
    if (s.sd) j["sd"] = *s.sd;
    return j;
}

const char* example_name(Example e) { return e == Example::LinearEx1 ? "linear" : "logistic"; }

} // namespace

nlohmann::json to_json(const SimReport& report, bool include_statistics) {
    nlohmann::json j;
    const SimDesign& d = report.design;
    j["design"] = {{"example", example_name(d.example)}, {"n", d.n},         {"p", d.p},
                   {"delta", d.delta},                   {"n_reps", d.n_reps}, {"seed", d.seed},
                   {"alpha", d.alpha}};
    j["failures"] = report.failures;
    j["retries"] = report.retries;
    j["methods"] = nlohmann::json::array();
    for (const MethodReport& m : report.methods) {
        nlohmann::json mj;
        mj["method"] = to_string(m.method);
        mj["test"] = test_name(m.method);
        mj["replicates"] = m.replicates;
        mj["l2_loss"] = summary_json(m.l2);
        mj["l1_loss"] = summary_json(m.l1);
        if (m.method != Method::OL) {
            mj["c"] = summary_json(m.c);
            mj["ic"] = summary_json(m.ic);
        }
        mj["rejection_rate"] = m.rejection_rate;
        mj["rejections"] = m.rejections;
        mj["nonconverged"] = m.nonconverged;
        mj["mean_lambda"] = m.mean_lambda;
        if (include_statistics) mj["statistics"] = m.statistics;
        j["methods"].push_back(mj);
    }
    return j;
}

nlohmann::json to_json(const ProstateReport& report) {
    nlohmann::json j;
    j["coefficients"] = nlohmann::json::array();
    for (const auto& r : report.coefficients)
        j["coefficients"].push_back({{"name", r.name}, {"LS", r.ls}, {"SCAD-PL", r.pl}, {"SCAD-PPL", r.ppl}});
    j["p_values"] = nlohmann::json::array();
    for (const auto& r : report.p_values)
        j["p_values"].push_back({{"name", r.name},
                                 {"LR", r.lr},
                                 {"SCAD-PLR", r.plr},
                                 {"SCAD-PPLR", r.pplr},
                                 {"LR_statistic", r.lr_statistic},
                                 {"PLR_statistic", r.plr_statistic},
                                 {"PPLR_statistic", r.pplr_statistic}});
    j["r_squared"] = {{"LS", report.r2_ls}, {"SCAD-PL", report.r2_pl}, {"SCAD-PPL", report.r2_ppl}};
    j["lambda"] = {{"SCAD-PL", report.lambda_pl}, {"SCAD-PPL", report.lambda_ppl}};
    j["ppl_unpenalized"] = report.ppl_unpenalized;
    j["converged"] = report.converged;
    return j;
}

void write_estimation_csv(std::ostream& os, const std::vector<SimReport>& reports) {
    if (reports.empty()) return;
    bool with_sd = true;
    for (const auto& r : reports)
        if (r.design.n_reps < 2) with_sd = false;

    const SimReport& first = reports.front();
    os << "n,p,delta";
    for (const MethodReport& m : first.methods) {
        const std::string tag = to_string(m.method);
        std::vector<std::string> cols{"L2", "L1"};
        if (m.method != Method::OL) {
            cols.push_back("C");
            cols.push_back("IC");
        }
        for (const auto& c : cols) {
            os << ',' << tag << '_' << c << "_mean";
            if (with_sd) os << ',' << tag << '_' << c << "_sd";
        }
    }
    os << '\n';
    for (const SimReport& r : reports) {
        os << r.design.n << ',' << r.design.p << ',' << format_number(r.design.delta, 2);
        for (const MethodReport& m : r.methods) {
            std::vector<const Summary*> cols{&m.l2, &m.l1};
            if (m.method != Method::OL) {
                cols.push_back(&m.c);
                cols.push_back(&m.ic);
            }
            for (const Summary* s : cols) {
                os << ',' << format_number(s->mean, 3);
                if (with_sd) os << ',' << format_number(s->sd.value_or(0.0), 3);
            }
        }
        os << '\n';
    }
}

void write_rejection_csv(std::ostream& os, const std::vector<SimReport>& reports) {
    if (reports.empty()) return;
    std::vector<double> deltas;
    for (const auto& r : reports)
        if (std::find(deltas.begin(), deltas.end(), r.design.delta) == deltas.end()) deltas.push_back(r.design.delta);

    os << "n,p,test";
    for (double d : deltas) os << ",delta=" << format_number(d, 1);
    os << '\n';

    // Rows keyed by (n, p) in first-seen order, then by method order.
    std::vector<std::pair<int, int>> cells;
    for (const auto& r : reports) {
        const std::pair<int, int> key{r.design.n, r.design.p};
        if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
    }
    for (const auto& [n, p] : cells) {
        for (std::size_t k = 0; k < reports.front().methods.size(); ++k) {
            const Method m = reports.front().methods[k].method;
            os << n << ',' << p << ',' << test_name(m);
            for (double d : deltas) {
                os << ',';
                for (const auto& r : reports)
                    if (r.design.n == n && r.design.p == p && r.design.delta == d)
                        os << format_number(r.methods[k].rejection_rate, 3);
            }
            os << '\n';
        }
    }
}

void write_qq_csv(std::ostream& os, const std::vector<QQPoint>& points) {
    os << "theoretical,empirical\n";
    for (const QQPoint& q : points) os << format_number(q.theoretical, 8) << ',' << format_number(q.empirical, 8) << '\n';
}

} // namespace pplr
