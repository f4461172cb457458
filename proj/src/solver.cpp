#include "pplr/solver.hpp"
#include "pplr/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pplr {

std::vector<bool> FitProblem::mask_except(int p, const IndexSet& unpenalized) {
    std::vector<bool> mask(static_cast<std::size_t>(p), true);
    for (int j : unpenalized) {
        require(j >= 0 && j < p, "unpenalized index " + std::to_string(j) + " out of range");
        mask[static_cast<std::size_t>(j)] = false;
    }
    return mask;
}

namespace {

std::vector<bool> effective_mask(const FitProblem& problem, int p) {
    if (problem.penalized.empty()) return std::vector<bool>(static_cast<std::size_t>(p), true);
    require(static_cast<int>(problem.penalized.size()) == p, "penalization mask length does not match p");
    return problem.penalized;
}

double penalty_sum(const Vector& beta, const PenaltySpec& penalty, const std::vector<bool>& mask) {
    if (penalty.inactive()) return 0.0;
    double s = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (mask[static_cast<std::size_t>(j)] && beta[j] != 0.0) s += penalty_value(penalty, std::abs(beta[j]));
    return s;
}

class CoordinateAscent {
public:
    CoordinateAscent(const Dataset& data, const FitProblem& problem, const SolverOptions& opts)
        : data_(data), penalty_(problem.penalty), opts_(opts), n_(static_cast<double>(data.n())) {
        validate(data);
        penalty_.validate();
        require(opts.tol > 0.0 && opts.max_iter >= 1, "solver tolerance and iteration cap must be positive");
        const int p = data.p();
        mask_ = effective_mask(problem, p);

        active_.assign(static_cast<std::size_t>(p), true);
        for (int j : problem.fixed_zero) {
            require(j >= 0 && j < p, "fixed_zero index " + std::to_string(j) + " out of range");
            active_[static_cast<std::size_t>(j)] = false;
        }

        beta_ = Vector::Zero(p);
        if (problem.init) {
            require(problem.init->size() == p, "initial coefficient vector has wrong length");
            require(problem.init->allFinite(), "initial coefficients must be finite");
            beta_ = *problem.init;
            for (int j : problem.fixed_zero)
                require(beta_[j] == 0.0, "initial value for fixed-zero coefficient " + data.name(j) + " is nonzero");
        }

        curvature_.resize(p);
        bool standardized = true;
        for (int j = 0; j < p; ++j) {
            const auto col = data.X.col(j);
            curvature_[j] = col.squaredNorm() / n_;
            if (curvature_[j] == 0.0) {
                if (active_[static_cast<std::size_t>(j)])
                    warnings_.push_back("column " + data.name(j) + " is identically zero; coefficient pinned to 0");
                active_[static_cast<std::size_t>(j)] = false;
                beta_[j] = 0.0;
                continue;
            }
            if (std::abs(col.mean()) > 1e-8 || std::abs(curvature_[j] - 1.0) > 1e-6) standardized = false;
        }
        if (!standardized) warnings_.push_back("design is not standardized (column means 0, sum of squares n)");
        eta_ = data.X * beta_;
    }

    FitResult run() {
        FitResult out;
        double obj = objective();
        if (!std::isfinite(obj)) throw FitError("initial objective is not finite");
        int sweep = 0;
        bool converged = false;
        while (sweep < opts_.max_iter) {
            ++sweep;
            double max_change = 0.0;
            for (int j = 0; j < data_.p(); ++j) {
                if (!active_[static_cast<std::size_t>(j)]) continue;
                const double change = data_.family == Family::GaussianIdentity ? gaussian_step(j)
                                                                                : logistic_step(j, obj);
                max_change = std::max(max_change, change);
            }
            obj = objective();
            if (!std::isfinite(obj)) throw FitError("objective became non-finite during coordinate ascent");
            if (opts_.record_trace) out.trace.push_back(obj);
            if (max_change < opts_.tol) {
                converged = true;
                break;
            }
        }
        // Recompute from scratch so the stored state carries no drift.
        eta_ = data_.X * beta_;
        out.beta = beta_;
        out.loglik = log_likelihood_eta(data_.family, data_.y, eta_);
        out.objective = out.loglik - n_ * penalty_sum(beta_, penalty_, mask_);
        if (!std::isfinite(out.objective)) throw FitError("objective is not finite at the solution");
        out.lambda = penalty_.lambda;
        out.df = static_cast<int>((beta_.array() != 0.0).count());
        out.iterations = sweep;
        out.converged = converged;
        out.warnings = std::move(warnings_);
        return out;
    }

private:
    const PenaltySpec& coordinate_penalty(int j) const {
        return mask_[static_cast<std::size_t>(j)] ? penalty_ : none_;
    }

    double objective() const {
        return log_likelihood_eta(data_.family, data_.y, eta_) - n_ * penalty_sum(beta_, penalty_, mask_);
    }

    // Exact one-dimensional maximiser: with c = ||X_j||^2 / n the objective in
    // b is -n * (0.5 * c * (b - z)^2 + p(|b|)) + const.
    double gaussian_step(int j) {
        const auto col = data_.X.col(j);
        const double c = curvature_[j];
        const double g = col.dot(data_.y - eta_) / n_;
        const double z = beta_[j] + g / c;
        const double b = scalar_prox(coordinate_penalty(j), z, c);
        const double delta = b - beta_[j];
        if (delta != 0.0) {
            eta_.noalias() += delta * col;
            beta_[j] = b;
        }
        return std::abs(delta);
    }

    // Local quadratic model of L/n in coordinate j, then the prox step,
    // accepted only if PQ does not decrease; otherwise the step is halved.
    double logistic_step(int j, double& obj) {
        const auto col = data_.X.col(j);
        double g = 0.0;
        double w = 0.0;
        for (Eigen::Index i = 0; i < eta_.size(); ++i) {
            const double mu = logistic(eta_[i]);
            const double x = col[i];
            g += x * (data_.y[i] - mu);
            w += mu * (1.0 - mu) * x * x;
        }
        g /= n_;
        w = std::max(w / n_, 1e-10 * curvature_[j]);
        const double z = beta_[j] + g / w;
        const PenaltySpec& pen = coordinate_penalty(j);
        const double old = beta_[j];
        const double full = scalar_prox(pen, z, w) - old;
        if (full == 0.0) return 0.0;

        const double base_pen = mask_[static_cast<std::size_t>(j)] && !penalty_.inactive()
                                    ? penalty_value(penalty_, std::abs(old))
                                    : 0.0;
        double step = full;
        for (int h = 0; h <= opts_.max_halvings; ++h, step *= 0.5) {
            const double b = old + step;
            trial_ = eta_ + step * col;
            double pen_b = 0.0;
            if (mask_[static_cast<std::size_t>(j)] && !penalty_.inactive()) pen_b = penalty_value(penalty_, std::abs(b));
            const double ll = log_likelihood_eta(data_.family, data_.y, trial_);
            const double candidate = ll - n_ * (penalty_sum(beta_, penalty_, mask_) - base_pen + pen_b);
            if (std::isfinite(candidate) && candidate >= obj) {
                eta_.swap(trial_);
                beta_[j] = b;
                obj = candidate;
                return std::abs(step);
            }
        }
        return 0.0;
    }

    const Dataset& data_;
    PenaltySpec penalty_;
    PenaltySpec none_ = PenaltySpec::none();
    SolverOptions opts_;
    double n_;
    std::vector<bool> mask_;
    std::vector<bool> active_;
    Vector beta_;
    Vector eta_;
    Vector trial_;
    Vector curvature_;
    std::vector<std::string> warnings_;
};

} // namespace

double penalized_objective(const Dataset& data, const Vector& beta, const PenaltySpec& penalty,
                           const std::vector<bool>& penalized) {
    const std::vector<bool> mask =
        penalized.empty() ? std::vector<bool>(static_cast<std::size_t>(data.p()), true) : penalized;
    require(static_cast<int>(mask.size()) == data.p(), "penalization mask length does not match p");
    return log_likelihood(data, beta) - static_cast<double>(data.n()) * penalty_sum(beta, penalty, mask);
}

FitResult fit(const Dataset& data, const FitProblem& problem, const SolverOptions& opts) {
    CoordinateAscent solver(data, problem, opts);
    return solver.run();
}

double lambda_max(const Dataset& data, const FitProblem& problem, const SolverOptions& opts) {
    const std::vector<bool> mask = effective_mask(problem, data.p());
    FitProblem sub;
    sub.penalty = PenaltySpec::none();
    sub.penalized = mask;
    sub.fixed_zero = problem.fixed_zero;
    for (int j = 0; j < data.p(); ++j)
        if (mask[static_cast<std::size_t>(j)]) sub.fixed_zero.push_back(j);
    std::sort(sub.fixed_zero.begin(), sub.fixed_zero.end());
    sub.fixed_zero.erase(std::unique(sub.fixed_zero.begin(), sub.fixed_zero.end()), sub.fixed_zero.end());

    const FitResult base = fit(data, sub, opts);
    const Vector g = score(data, base.beta) / static_cast<double>(data.n());
    std::vector<bool> fixed(static_cast<std::size_t>(data.p()), false);
    for (int j : problem.fixed_zero) fixed[static_cast<std::size_t>(j)] = true;
    double lmax = 0.0;
    for (int j = 0; j < data.p(); ++j)
        if (mask[static_cast<std::size_t>(j)] && !fixed[static_cast<std::size_t>(j)])
            lmax = std::max(lmax, std::abs(g[j]));
    return lmax;
}

std::vector<double> lambda_grid(double lambda_max, int count, double ratio) {
    require(lambda_max > 0.0 && std::isfinite(lambda_max), "lambda_max must be positive");
    require(count >= 1, "grid must have at least one point");
    require(ratio > 0.0 && ratio < 1.0, "grid ratio must lie in (0, 1)");
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    const double step = std::log(ratio) / static_cast<double>(count - 1);
    for (int k = 0; k < count; ++k) grid[static_cast<std::size_t>(k)] = lambda_max * std::exp(step * k);
    return grid;
}

std::vector<FitResult> fit_path(const Dataset& data, const FitProblem& problem,
                                const std::vector<double>& lambdas, const SolverOptions& opts) {
    require(!lambdas.empty(), "fit_path: empty lambda grid");
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        require(lambdas[k] > 0.0, "fit_path: grid values must be strictly positive");
        if (k > 0) require(lambdas[k] < lambdas[k - 1], "fit_path: grid must be strictly descending");
    }
    std::vector<FitResult> path;
    path.reserve(lambdas.size());
    FitProblem current = problem;
    for (double l : lambdas) {
        current.penalty = problem.penalty.with_lambda(l);
        path.push_back(fit(data, current, opts));
        current.init = path.back().beta;
    }
    return path;
}

double bic_scale(int p) {
    require(p >= 1, "bic_scale: p must be >= 1");
    if (p < 3) return 1.0; // log log p is undefined or negative
    return std::max(std::log(std::log(static_cast<double>(p))), 1.0);
}

double bic(const FitResult& result, int n, int p, BicLoss loss) {
    const double fit_term = loss == BicLoss::PenalizedObjective ? result.objective : result.loglik;
    return -2.0 * fit_term + bic_scale(p) * std::log(static_cast<double>(n)) * result.df;
}

Selection select_bic(const std::vector<double>& lambdas, const std::vector<FitResult>& path, int n, int p,
                     BicLoss loss) {
    require(!path.empty(), "select_bic: empty path");
    require(lambdas.size() == path.size(), "select_bic: grid and path lengths differ");
    Selection sel;
    sel.bic.reserve(path.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double b = bic(path[k], n, p, loss);
        sel.bic.push_back(b);
        // the grid descends, so the earlier (larger) lambda keeps ties
        if (k == 0 || b < best - 1e-9 * std::max(1.0, std::abs(best))) {
            best = b;
            sel.index = k;
        }
    }
    sel.lambda = lambdas[sel.index];
    sel.fit = path[sel.index];
    return sel;
}

Selection tune_bic(const Dataset& data, const FitProblem& problem, const TuneOptions& opts) {
    const std::vector<bool> mask = effective_mask(problem, data.p());
    const bool any_penalized = std::find(mask.begin(), mask.end(), true) != mask.end();
    if (problem.penalty.family == PenaltyFamily::None || !any_penalized) {
        FitProblem single = problem;
        single.penalty = problem.penalty.with_lambda(0.0);
        FitResult r = fit(data, single, opts.solver);
        Selection sel;
        sel.bic = {bic(r, data.n(), data.p(), opts.loss)};
        sel.fit = std::move(r);
        return sel;
    }
    double lmax = lambda_max(data, problem, opts.solver);
    if (lmax <= 0.0) lmax = std::numeric_limits<double>::min();
    const std::vector<double> grid = lambda_grid(lmax, opts.grid_size, opts.grid_ratio);
    const std::vector<FitResult> path = fit_path(data, problem, grid, opts.solver);
    return select_bic(grid, path, data.n(), data.p(), opts.loss);
}

} // namespace pplr
