#include "pplr/inference.hpp"
#include "pplr/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pplr {

const char* to_string(TestMethod method) {
    switch (method) {
    case TestMethod::PPLR: return "pplr";
    case TestMethod::PLR: return "plr";
    case TestMethod::OLR: return "olr";
    }
    return "unknown";
}

TestMethod test_method_from_string(const std::string& name) {
    if (name == "pplr") return TestMethod::PPLR;
    if (name == "plr") return TestMethod::PLR;
    if (name == "olr" || name == "lr") return TestMethod::OLR;
    throw ContractViolation("unknown test method '" + name + "' (expected pplr, plr or olr)");
}

namespace {

constexpr double kNegativeSlack = 1e-8;

void check_hypothesis(const Dataset& data, const ZeroSubset& h) {
    const int d = static_cast<int>(h.indices.size());
    require(d >= 1, "hypothesis must test at least one coefficient");
    require(d < data.p(), "hypothesis must leave at least one coefficient untested (d < p)");
    std::set<int> seen;
    for (int j : h.indices) {
        require(j >= 0 && j < data.p(), "tested index " + std::to_string(j) + " out of range");
        require(seen.insert(j).second, "tested indices must be distinct");
    }
}

// Shared driver for the three statistics: fit the full space (tuning lambda
// by BIC unless pinned), refit under H0 at the same lambda, and take twice the
// gap in the maximised objective.
TestReport likelihood_ratio(TestMethod method, const Dataset& data, const ZeroSubset& h, FitProblem full,
                            const TestOptions& opts) {
    TestReport rep;
    rep.method = method;
    rep.df = static_cast<int>(h.indices.size());

    if (opts.lambda) {
        require(*opts.lambda >= 0.0, "lambda must be >= 0");
        full.penalty = full.penalty.with_lambda(*opts.lambda);
        rep.full_fit = fit(data, full, opts.tune.solver);
    } else {
        Selection sel = tune_bic(data, full, opts.tune);
        full.penalty = full.penalty.with_lambda(sel.lambda);
        rep.full_fit = std::move(sel.fit);
    }
    rep.lambda_used = full.penalty.lambda;

    FitProblem null = full;
    null.fixed_zero = h.indices;
    Vector start = rep.full_fit.beta;
    for (int j : h.indices) start[j] = 0.0;
    null.init = start;
    rep.null_fit = fit(data, null, opts.tune.solver);

    // The null optimum is feasible for the full problem; if coordinate ascent
    // left the full fit at a worse local optimum, restart it from there.
    if (rep.null_fit.objective > rep.full_fit.objective) {
        FitProblem retry = full;
        retry.init = rep.null_fit.beta;
        FitResult again = fit(data, retry, opts.tune.solver);
        if (again.objective > rep.full_fit.objective) rep.full_fit = std::move(again);
    }

    rep.converged = rep.full_fit.converged && rep.null_fit.converged;
    rep.raw_statistic = 2.0 * (rep.full_fit.objective - rep.null_fit.objective);
    if (rep.raw_statistic >= 0.0) {
        rep.statistic = rep.raw_statistic;
    } else if (rep.raw_statistic >= -kNegativeSlack) {
        rep.statistic = 0.0;
    } else {
        rep.statistic = rep.raw_statistic;
        rep.converged = false;
    }
    rep.p_value = chi2_sf(std::max(rep.statistic, 0.0), rep.df);
    return rep;
}

void check_mle_exists(const Dataset& data, const FitResult& r, const char* which) {
    if (data.family != Family::BernoulliLogit) return;
    const Vector eta = data.X * r.beta;
    if (!r.converged && eta.cwiseAbs().maxCoeff() > 30.0)
        throw FitError(std::string("logistic MLE does not exist (separation) in the ") + which + " model");
}

} // namespace

TestReport pplr_test(const Dataset& data, const ZeroSubset& hypothesis, const PenaltySpec& penalty,
                     const TestOptions& opts) {
    validate(data);
    check_hypothesis(data, hypothesis);
    IndexSet unpen = hypothesis.indices;
    unpen.insert(unpen.end(), opts.extra_unpenalized.begin(), opts.extra_unpenalized.end());
    FitProblem full;
    full.penalty = penalty;
    full.penalized = FitProblem::mask_except(data.p(), unpen);
    require(std::find(full.penalized.begin(), full.penalized.end(), true) != full.penalized.end(),
            "PPLR needs at least one penalized coefficient");
    return likelihood_ratio(TestMethod::PPLR, data, hypothesis, std::move(full), opts);
}

TestReport plr_test(const Dataset& data, const ZeroSubset& hypothesis, const PenaltySpec& penalty,
                    const TestOptions& opts) {
    validate(data);
    check_hypothesis(data, hypothesis);
    FitProblem full;
    full.penalty = penalty;
    full.penalized.assign(static_cast<std::size_t>(data.p()), true);
    return likelihood_ratio(TestMethod::PLR, data, hypothesis, std::move(full), opts);
}

TestReport olr_test(const Dataset& data, const ZeroSubset& hypothesis, const TestOptions& opts) {
    validate(data);
    check_hypothesis(data, hypothesis);
    require(data.n() > data.p(), "OLR requires n > p");
    Eigen::ColPivHouseholderQR<Matrix> qr(data.X);
    if (qr.rank() < data.p()) throw FitError("design matrix is rank deficient; unpenalized MLE is not unique");

    FitProblem full;
    full.penalty = PenaltySpec::none();
    full.penalized.assign(static_cast<std::size_t>(data.p()), false);
    TestOptions o = opts;
    o.lambda = 0.0;
    TestReport rep = likelihood_ratio(TestMethod::OLR, data, hypothesis, std::move(full), o);
    check_mle_exists(data, rep.full_fit, "full");
    check_mle_exists(data, rep.null_fit, "null");
    return rep;
}

TestReport run_test(TestMethod method, const Dataset& data, const ZeroSubset& hypothesis,
                    const PenaltySpec& penalty, const TestOptions& opts) {
    switch (method) {
    case TestMethod::PPLR: return pplr_test(data, hypothesis, penalty, opts);
    case TestMethod::PLR: return plr_test(data, hypothesis, penalty, opts);
    case TestMethod::OLR: return olr_test(data, hypothesis, opts);
    }
    throw ContractViolation("unknown test method");
}

Dataset LinearTransform::apply(const Dataset& data) const {
    require(A_tilde.rows() == data.p(), "transform dimension does not match p");
    Dataset out;
    out.X = data.X * A_tilde.transpose();
    out.y = data.y;
    out.family = data.family;
    for (int j = 0; j < data.p(); ++j)
        out.names.push_back(j < d ? "A" + std::to_string(j + 1) : "B" + std::to_string(j - d + 1));
    return out;
}

LinearTransform linear_transform(const Matrix& A) {
    const Eigen::Index d = A.rows();
    const Eigen::Index p = A.cols();
    require(d >= 1 && d < p, "linear hypothesis needs 1 <= d < p rows");
    require(A.allFinite(), "constraint matrix has non-finite entries");
    const Matrix gram = A * A.transpose();
    require((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10,
            "constraint matrix must have orthonormal rows (A A^T = I); it is rank deficient or unnormalised");

    LinearTransform t;
    t.d = static_cast<int>(d);
    t.A_tilde.resize(p, p);
    t.A_tilde.topRows(d) = A;

    // Column j of `proj` is e_j projected onto the orthogonal complement of
    // the rows chosen so far; the longest one is completed next (lowest index
    // on ties), which makes the basis deterministic.
    Matrix proj = Matrix::Identity(p, p) - A.transpose() * A;
    for (Eigen::Index k = d; k < p; ++k) {
        Eigen::Index best = 0;
        double best_norm = -1.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double nrm = proj.col(j).norm();
            if (nrm > best_norm + 1e-12) {
                best_norm = nrm;
                best = j;
            }
        }
        if (best_norm < 1e-8) throw ContractViolation("orthonormal completion failed: A is rank deficient");
        Vector q = proj.col(best) / best_norm;
        // Second Gram-Schmidt pass against every row accepted so far.
        for (Eigen::Index r = 0; r < k; ++r) q -= t.A_tilde.row(r).dot(q) * t.A_tilde.row(r).transpose();
        q.normalize();
        // Snap exact-zero structure produced by axis-aligned inputs.
        for (Eigen::Index i = 0; i < p; ++i)
            if (std::abs(q[i]) < 1e-15) q[i] = 0.0;
        t.A_tilde.row(k) = q.transpose();
        proj -= q * q.transpose();
    }
    return t;
}

TestReport linear_test(TestMethod method, const Dataset& data, const LinearConstraint& hypothesis,
                       const PenaltySpec& penalty, const TestOptions& opts) {
    validate(data);
    require(hypothesis.A.cols() == data.p(), "constraint matrix must have p columns");
    const LinearTransform t = linear_transform(hypothesis.A);
    const Dataset transformed = t.apply(data);
    ZeroSubset h;
    for (int j = 0; j < t.d; ++j) h.indices.push_back(j);
    return run_test(method, transformed, h, penalty, opts);
}

TestReport run_test(TestMethod method, const Dataset& data, const HypothesisSpec& hypothesis,
                    const PenaltySpec& penalty, const TestOptions& opts) {
    if (const auto* z = std::get_if<ZeroSubset>(&hypothesis)) return run_test(method, data, *z, penalty, opts);
    return linear_test(method, data, std::get<LinearConstraint>(hypothesis), penalty, opts);
}

FisherBlocks fisher_blocks(const Dataset& data, const Vector& beta, const IndexSet& active, const IndexSet& tested) {
    require(!tested.empty(), "tested set must be nonempty");
    std::set<int> act(active.begin(), active.end());
    require(act.size() == active.size(), "active indices must be distinct");
    IndexSet order = tested;
    std::set<int> tst(tested.begin(), tested.end());
    require(tst.size() == tested.size(), "tested indices must be distinct");
    for (int j : tested) require(act.count(j) == 1, "tested indices must be a subset of the active set");
    for (int j : active)
        if (!tst.count(j)) order.push_back(j);

    const Matrix info = fisher_information(data, beta, order);
    const Eigen::Index d = static_cast<Eigen::Index>(tested.size());
    const Eigen::Index s = static_cast<Eigen::Index>(order.size()) - d;
    FisherBlocks b;
    b.C11 = info.topLeftCorner(d, d);
    b.C12 = info.topRightCorner(d, s);
    b.C21 = info.bottomLeftCorner(s, d);
    b.C22 = info.bottomRightCorner(s, s);
    if (s == 0) {
        b.C11_2 = b.C11;
        return b;
    }
    Eigen::LDLT<Matrix> ldlt(b.C22);
    const double scale = std::max(b.C22.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * scale)
        throw FitError("nuisance block C22 of the Fisher information is singular");
    b.C11_2 = b.C11 - b.C12 * ldlt.solve(b.C21);
    b.C11_2 = 0.5 * (b.C11_2 + b.C11_2.transpose());
    return b;
}

double noncentral_param(const Dataset& data, const Vector& beta, const IndexSet& active, const IndexSet& tested,
                        const Vector& delta) {
    require(delta.size() == static_cast<Eigen::Index>(tested.size()), "delta length must equal number of tested coefficients");
    const FisherBlocks b = fisher_blocks(data, beta, active, tested);
    return delta.dot(b.C11_2 * delta);
}

} // namespace pplr
