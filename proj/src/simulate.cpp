#include "pplr/simulate.hpp"
#include "pplr/dataio.hpp"
#include "pplr/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace pplr {

void SimDesign::validate() const {
    require(p >= 5, "simulation needs p >= 5");
    require(n > p, "simulation needs n > p");
    require(n_reps >= 1, "simulation needs at least one replicate");
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(std::isfinite(delta), "delta must be finite");
}

const char* to_string(Method method) {
    switch (method) {
    case Method::PPL: return "PPL";
    case Method::PL: return "PL";
    case Method::OL: return "OL";
    }
    return "unknown";
}

const char* test_name(Method method) {
    switch (method) {
    case Method::PPL: return "PPLR";
    case Method::PL: return "PLR";
    case Method::OL: return "LR";
    }
    return "unknown";
}

TestMethod test_method(Method method) {
    switch (method) {
    case Method::PPL: return TestMethod::PPLR;
    case Method::PL: return TestMethod::PLR;
    case Method::OL: return TestMethod::OLR;
    }
    return TestMethod::OLR;
}

Method method_from_string(const std::string& name) {
    std::string s;
    for (char ch : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (s == "ppl" || s == "pplr") return Method::PPL;
    if (s == "pl" || s == "plr") return Method::PL;
    if (s == "ol" || s == "olr" || s == "lr") return Method::OL;
    throw ContractViolation("unknown method '" + name + "' (expected ppl, pl or ol)");
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t rep_index, std::uint64_t role, std::uint64_t attempt) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(rep_index), hi(rep_index), lo(role), hi(role), lo(attempt), hi(attempt)};
    return std::mt19937_64(seq);
}

Vector true_coefficients(const SimDesign& design) {
    Vector beta = Vector::Zero(design.p);
    beta[0] = design.delta / std::sqrt(static_cast<double>(design.n));
    beta[1] = 3.0;
    beta[2] = 1.5;
    beta[3] = 2.0;
    beta[4] = 1.0;
    return beta;
}

namespace {

enum StreamRole : std::uint64_t { kCovariates = 1, kResponse = 2 };

} // namespace

Replicate generate(const SimDesign& design, int rep_index, int attempt) {
    design.validate();
    auto xrng = substream(design.seed, static_cast<std::uint64_t>(rep_index), kCovariates,
                          static_cast<std::uint64_t>(attempt));
    auto yrng = substream(design.seed, static_cast<std::uint64_t>(rep_index), kResponse,
                          static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> normal(0.0, 1.0);

    Dataset cov;
    cov.X.resize(design.n, design.p);
    for (int i = 0; i < design.n; ++i)
        for (int j = 0; j < design.p; ++j) cov.X(i, j) = normal(xrng);
    cov.y = Vector::Zero(design.n);

    Replicate rep;
    rep.beta_true = true_coefficients(design);
    rep.attempt = attempt;
    // The response is generated from the standardized covariates so that
    // beta_true is the truth on the scale the estimators work on.
    rep.data.X = standardize(cov).data.X;
    const Vector eta = rep.data.X * rep.beta_true;
    rep.data.y.resize(design.n);
    if (design.example == Example::LinearEx1) {
        rep.data.family = Family::GaussianIdentity;
        for (int i = 0; i < design.n; ++i) rep.data.y[i] = eta[i] + normal(yrng);
        rep.data.y.array() -= rep.data.y.mean();
    } else {
        rep.data.family = Family::BernoulliLogit;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < design.n; ++i) rep.data.y[i] = unif(yrng) < logistic(eta[i]) ? 1.0 : 0.0;
    }
    return rep;
}

Metrics metrics(const Vector& beta_hat, const Vector& beta_true) {
    require(beta_hat.size() == beta_true.size(), "metrics: coefficient vectors differ in length");
    Metrics m;
    const Vector err = beta_hat - beta_true;
    m.l2 = err.norm();
    m.l1 = err.cwiseAbs().sum();
    for (Eigen::Index j = 0; j < beta_true.size(); ++j) {
        if (beta_hat[j] != 0.0) continue;
        if (beta_true[j] == 0.0)
            ++m.correct_zeros;
        else
            ++m.incorrect_zeros;
    }
    return m;
}

std::vector<QQPoint> qq_data(const std::vector<double>& statistics, int d) {
    require(!statistics.empty(), "qq_data: no statistics");
    std::vector<double> sorted = statistics;
    std::sort(sorted.begin(), sorted.end());
    const double m = static_cast<double>(sorted.size());
    std::vector<QQPoint> out(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        out[i] = {chi2_quantile((static_cast<double>(i) + 0.5) / m, d), sorted[i]};
    return out;
}

double ks_distance_chi2(const std::vector<double>& statistics, int d) {
    require(!statistics.empty(), "ks_distance_chi2: no statistics");
    std::vector<double> sorted = statistics;
    std::sort(sorted.begin(), sorted.end());
    const double m = static_cast<double>(sorted.size());
    double dist = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = chi2_cdf(std::max(sorted[i], 0.0), d);
        dist = std::max({dist, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
    }
    return dist;
}

int default_threads() {
    if (const char* env = std::getenv("PPLR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct MethodOutcome {
    Metrics metrics;
    double statistic = 0.0;
    double p_value = 1.0;
    double lambda = 0.0;
    bool converged = true;
};

struct ReplicateOutcome {
    bool ok = false;
    int retries = 0;
    std::vector<MethodOutcome> methods;
};

ReplicateOutcome run_replicate(const SimDesign& design, const std::vector<Method>& methods, const StudyOptions& opts,
                               int rep_index) {
    ReplicateOutcome out;
    const ZeroSubset h{{0}};
    TestOptions topts;
    topts.tune = opts.tune;
    for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
        const Replicate rep = generate(design, rep_index, attempt);
        try {
            out.methods.clear();
            for (Method m : methods) {
                const TestReport r = run_test(test_method(m), rep.data, h, opts.penalty, topts);
                MethodOutcome mo;
                mo.metrics = metrics(r.full_fit.beta, rep.beta_true);
                mo.statistic = r.statistic;
                mo.p_value = r.p_value;
                mo.lambda = r.lambda_used;
                mo.converged = r.converged;
                out.methods.push_back(mo);
            }
            out.ok = true;
            return out;
        } catch (const FitError&) {
            ++out.retries;
        }
    }
    return out;
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

} // namespace

SimReport run_study(const SimDesign& design, const std::set<Method>& methods, const StudyOptions& opts) {
    design.validate();
    require(!methods.empty(), "run_study: no methods requested");
    const std::vector<Method> order(methods.begin(), methods.end());
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(design.n_reps));

    const int threads = std::clamp(opts.threads, 1, design.n_reps);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < design.n_reps; r = next++)
            outcomes[static_cast<std::size_t>(r)] = run_replicate(design, order, opts, r);
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Deterministic fold in replicate order.
    SimReport report;
    report.design = design;
    for (const auto& o : outcomes) {
        report.retries += o.retries;
        if (!o.ok) ++report.failures;
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
        MethodReport mr;
        mr.method = order[k];
        std::vector<double> l2, l1, c, ic;
        double lambda_sum = 0.0;
        for (const auto& o : outcomes) {
            if (!o.ok) continue;
            const MethodOutcome& mo = o.methods[k];
            l2.push_back(mo.metrics.l2);
            l1.push_back(mo.metrics.l1);
            c.push_back(mo.metrics.correct_zeros);
            ic.push_back(mo.metrics.incorrect_zeros);
            mr.statistics.push_back(mo.statistic);
            if (mo.p_value < design.alpha) ++mr.rejections;
            if (!mo.converged) ++mr.nonconverged;
            lambda_sum += mo.lambda;
        }
        mr.replicates = static_cast<int>(l2.size());
        mr.l2 = summarize(l2);
        mr.l1 = summarize(l1);
        mr.c = summarize(c);
        mr.ic = summarize(ic);
        if (mr.replicates > 0) {
            mr.rejection_rate = static_cast<double>(mr.rejections) / mr.replicates;
            mr.mean_lambda = lambda_sum / mr.replicates;
            mr.qq = qq_data(mr.statistics, 1);
        }
        report.methods.push_back(std::move(mr));
    }
    return report;
}

} // namespace pplr
