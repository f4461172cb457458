#include "pplr/glm.hpp"
#include "pplr/error.hpp"

#include <cmath>
#include <numbers>

namespace pplr {

const char* to_string(Family family) {
    switch (family) {
    case Family::GaussianIdentity: return "gaussian";
    case Family::BernoulliLogit: return "logistic";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "gaussian") return Family::GaussianIdentity;
    if (name == "logistic" || name == "binomial") return Family::BernoulliLogit;
    throw ContractViolation("unknown family '" + name + "' (expected gaussian or logistic)");
}

std::string Dataset::name(int j) const {
    if (j >= 0 && j < static_cast<int>(names.size())) return names[j];
    return "x" + std::to_string(j + 1);
}

void validate(const Dataset& data) {
    require(data.n() >= 1 && data.p() >= 1, "dataset must have n >= 1 and p >= 1");
    require(data.y.size() == data.X.rows(), "response length does not match number of rows of X");
    require(data.names.empty() || static_cast<int>(data.names.size()) == data.p(),
            "column names do not match number of columns of X");
    require(data.X.allFinite(), "design matrix has non-finite entries");
    require(data.y.allFinite(), "response has non-finite entries");
    if (data.family == Family::BernoulliLogit) {
        for (Eigen::Index i = 0; i < data.y.size(); ++i)
            require(data.y[i] == 0.0 || data.y[i] == 1.0,
                    "logistic response must be 0/1 (row " + std::to_string(i + 1) + ")");
    }
}

namespace {

void check_beta(const Dataset& data, const Vector& beta) {
    require(beta.size() == data.X.cols(), "coefficient length " + std::to_string(beta.size()) +
                                              " does not match p = " + std::to_string(data.p()));
    require(data.y.size() == data.X.rows(), "response length does not match number of rows of X");
    require(beta.allFinite(), "coefficients must be finite");
}

// Working weights of the canonical-link GLM: 1 (Gaussian, sigma = 1) or mu(1 - mu).
Vector glm_weights(const Dataset& data, const Vector& eta) {
    if (data.family == Family::GaussianIdentity) return Vector::Ones(eta.size());
    Vector w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double mu = logistic(eta[i]);
        w[i] = mu * (1.0 - mu);
    }
    return w;
}

Vector mean_response(Family family, const Vector& eta) {
    if (family == Family::GaussianIdentity) return eta;
    return eta.unaryExpr([](double v) { return logistic(v); });
}

} // namespace

double log_likelihood_eta(Family family, const Vector& y, const Vector& eta) {
    if (family == Family::GaussianIdentity) {
        const double rss = (y - eta).squaredNorm();
        return -0.5 * rss - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += y[i] * eta[i] - log1p_exp(eta[i]);
    return ll;
}

double log_likelihood(const Dataset& data, const Vector& beta) {
    check_beta(data, beta);
    return log_likelihood_eta(data.family, data.y, data.X * beta);
}

Vector score(const Dataset& data, const Vector& beta) {
    check_beta(data, beta);
    const Vector eta = data.X * beta;
    return data.X.transpose() * (data.y - mean_response(data.family, eta));
}

Matrix neg_hessian(const Dataset& data, const Vector& beta) {
    check_beta(data, beta);
    if (data.family == Family::GaussianIdentity) return data.X.transpose() * data.X;
    const Vector w = glm_weights(data, data.X * beta);
    Matrix h = data.X.transpose() * w.asDiagonal() * data.X;
    return 0.5 * (h + h.transpose());
}

LikelihoodEval evaluate(const Dataset& data, const Vector& beta) {
    check_beta(data, beta);
    const Vector eta = data.X * beta;
    LikelihoodEval out;
    out.loglik = log_likelihood_eta(data.family, data.y, eta);
    out.score = data.X.transpose() * (data.y - mean_response(data.family, eta));
    const Vector w = glm_weights(data, eta);
    Matrix h = data.X.transpose() * w.asDiagonal() * data.X;
    out.neg_hessian = 0.5 * (h + h.transpose());
    return out;
}

Matrix fisher_information(const Dataset& data, const Vector& beta, const IndexSet& subset) {
    check_beta(data, beta);
    require(!subset.empty(), "fisher_information: empty index subset");
    for (int j : subset)
        require(j >= 0 && j < data.p(), "fisher_information: index " + std::to_string(j) + " out of range");

    const Vector w = glm_weights(data, data.X * beta);
    Matrix Xs(data.n(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t k = 0; k < subset.size(); ++k) Xs.col(k) = data.X.col(subset[k]);
    Matrix info = Xs.transpose() * w.asDiagonal() * Xs / static_cast<double>(data.n());
    return 0.5 * (info + info.transpose());
}

} // namespace pplr
