#pragma once

#include "pplr/glm.hpp"

#include <cstdint>
#include <random>

namespace pplr::testing {

inline Matrix normal_matrix(int n, int p, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix X(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = z(rng);
    return X;
}

// Columns centered with sum of squares n.
inline Matrix standardize_columns(Matrix X) {
    const double n = static_cast<double>(X.rows());
    for (int j = 0; j < X.cols(); ++j) {
        X.col(j).array() -= X.col(j).mean();
        X.col(j) *= std::sqrt(n / X.col(j).squaredNorm());
    }
    return X;
}

inline Dataset gaussian_data(int n, int p, const Vector& beta, std::uint64_t seed, bool standardized = true) {
    std::mt19937_64 rng(seed);
    Dataset d;
    d.X = normal_matrix(n, p, rng);
    if (standardized) d.X = standardize_columns(d.X);
    std::normal_distribution<double> z(0.0, 1.0);
    d.y = d.X * beta;
    for (int i = 0; i < n; ++i) d.y[i] += z(rng);
    if (standardized) d.y.array() -= d.y.mean();
    d.family = Family::GaussianIdentity;
    return d;
}

inline Dataset logistic_data(int n, int p, const Vector& beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Dataset d;
    d.X = standardize_columns(normal_matrix(n, p, rng));
    const Vector eta = d.X * beta;
    d.y.resize(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < n; ++i) d.y[i] = u(rng) < logistic(eta[i]) ? 1.0 : 0.0;
    d.family = Family::BernoulliLogit;
    return d;
}

// beta = (b0, 3, 1.5, 2, 1, 0, ..., 0)
inline Vector example_beta(int p, double b0 = 0.0) {
    Vector b = Vector::Zero(p);
    b[0] = b0;
    b[1] = 3.0;
    b[2] = 1.5;
    b[3] = 2.0;
    b[4] = 1.0;
    return b;
}

} // namespace pplr::testing
