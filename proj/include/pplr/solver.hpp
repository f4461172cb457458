#pragma once

#include "pplr/glm.hpp"
#include "pplr/penalty.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pplr {

struct SolverOptions {
    double tol = 1e-7;     // on the largest coordinate change within a sweep
    int max_iter = 10000;  // sweeps
    int max_halvings = 20; // logistic step-halving guard
    bool record_trace = false;
};

// Maximise PQ(beta) = L(beta) - n * sum_{j penalized} p_lambda(|beta_j|)
// subject to beta_j = 0 for j in fixed_zero.
struct FitProblem {
    PenaltySpec penalty;
    std::vector<bool> penalized; // empty means "every coordinate penalized"
    IndexSet fixed_zero;
    std::optional<Vector> init;

    // Mask with the listed coordinates unpenalized and all others penalized.
    static std::vector<bool> mask_except(int p, const IndexSet& unpenalized);
};

struct FitResult {
    Vector beta;
    double objective = 0.0;
    double loglik = 0.0; // L(beta) alone
    double lambda = 0.0;
    int df = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace; // PQ after each sweep, when requested
    std::vector<std::string> warnings;
};

// PQ(beta) for the given penalty and mask; the reference definition the
// solver's stored objective must agree with.
double penalized_objective(const Dataset& data, const Vector& beta, const PenaltySpec& penalty,
                           const std::vector<bool>& penalized);

// Cyclic coordinate ascent. Non-convergence is reported through
// FitResult::converged; a non-finite objective throws FitError.
FitResult fit(const Dataset& data, const FitProblem& problem, const SolverOptions& opts = {});

// Smallest lambda at which every penalized coefficient is zero at the
// solution of the unpenalized sub-problem.
double lambda_max(const Dataset& data, const FitProblem& problem, const SolverOptions& opts = {});

// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, int count = 100, double ratio = 1e-3);

// Warm-started fits along a strictly positive, strictly descending grid.
std::vector<FitResult> fit_path(const Dataset& data, const FitProblem& problem,
                                const std::vector<double>& lambdas, const SolverOptions& opts = {});

// C_n = max{log log p, 1}.
double bic_scale(int p);

// Goodness-of-fit term of the BIC: -2 L (default) or -2 PQ with the penalty
// included. Under SCAD every large coefficient is charged (a + 1) lambda^2 / 2
// even though it is left unshrunk, so the -2 PQ form drifts to small lambda.
enum class BicLoss { LogLikelihood, PenalizedObjective };

double bic(const FitResult& result, int n, int p, BicLoss loss = BicLoss::LogLikelihood);

struct Selection {
    double lambda = 0.0;
    std::size_t index = 0;
    FitResult fit;
    std::vector<double> bic;
};

// Grid point minimising BIC; ties go to the larger lambda.
Selection select_bic(const std::vector<double>& lambdas, const std::vector<FitResult>& path, int n, int p,
                     BicLoss loss = BicLoss::LogLikelihood);

struct TuneOptions {
    int grid_size = 100;
    double grid_ratio = 1e-3;
    BicLoss loss = BicLoss::LogLikelihood;
    SolverOptions solver;
};

// lambda_max -> grid -> path -> BIC. When the penalty is inactive the single
// unpenalized fit is returned.
Selection tune_bic(const Dataset& data, const FitProblem& problem, const TuneOptions& opts = {});

} // namespace pplr
