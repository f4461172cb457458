#pragma once

#include <Eigen/Dense>

#include <cmath>

#include <string>
#include <vector>

namespace pplr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexSet = std::vector<int>;

enum class Family { GaussianIdentity, BernoulliLogit };

const char* to_string(Family family);
Family family_from_string(const std::string& name);

// Observations for a GLM with canonical link and no intercept. The Gaussian
// family has its error variance fixed at one, so the log-likelihood is fully
// specified. Column names are optional; when present they label coefficients.
struct Dataset {
    Matrix X;
    Vector y;
    Family family = Family::GaussianIdentity;
    std::vector<std::string> names;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
    std::string name(int j) const;
};

// Throws ContractViolation when shapes disagree, entries are non-finite or a
// Bernoulli response is not 0/1.
void validate(const Dataset& data);

struct LikelihoodEval {
    double loglik = 0.0;
    Vector score;
    Matrix neg_hessian;
};

double log_likelihood(const Dataset& data, const Vector& beta);
Vector score(const Dataset& data, const Vector& beta);
Matrix neg_hessian(const Dataset& data, const Vector& beta);
LikelihoodEval evaluate(const Dataset& data, const Vector& beta);

// (1/n) times the expected information on the rows/columns listed in `subset`,
// in the order given.
Matrix fisher_information(const Dataset& data, const Vector& beta, const IndexSet& subset);

// Building blocks shared with the solver, which tracks the linear predictor
// incrementally instead of recomputing X * beta.
double log_likelihood_eta(Family family, const Vector& y, const Vector& eta);

// log(1 + exp(x)) without overflow.
inline double log1p_exp(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace pplr
