#include "pplr/chi2.hpp"
#include "pplr/error.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pplr {

double chi2_cdf(double x, int k) {
    require(k >= 1, "chi2_cdf: degrees of freedom must be >= 1");
    require(x >= 0.0, "chi2_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(0.5 * k, 0.5 * x);
}

double chi2_sf(double x, int k) {
    require(k >= 1, "chi2_sf: degrees of freedom must be >= 1");
    require(x >= 0.0, "chi2_sf: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

double chi2_quantile(double prob, int k) {
    require(k >= 1, "chi2_quantile: degrees of freedom must be >= 1");
    require(prob >= 0.0 && prob < 1.0, "chi2_quantile: probability must lie in [0, 1)");
    if (prob == 0.0) return 0.0;
    return 2.0 * boost::math::gamma_p_inv(0.5 * k, prob);
}

double noncentral_chi2_cdf(double x, int k, double gamma) {
    require(gamma >= 0.0 && std::isfinite(gamma), "noncentral_chi2_cdf: gamma must be finite and >= 0");
    if (gamma == 0.0) return chi2_cdf(x, k);
    require(x >= 0.0, "noncentral_chi2_cdf: x must be >= 0");
    if (x == 0.0) return 0.0;

    // Poisson weights evaluated in log space from the mode outwards so that
    // large gamma does not underflow exp(-gamma / 2).
    const double mean = 0.5 * gamma;
    const long mode = static_cast<long>(std::floor(mean));
    auto log_weight = [&](long j) {
        return -mean + static_cast<double>(j) * std::log(mean) - std::lgamma(static_cast<double>(j) + 1.0);
    };
    constexpr double kTail = 1e-12;

    double sum = 0.0;
    double mass = 0.0;
    for (long j = mode; j >= 0; --j) {
        const double w = std::exp(log_weight(j));
        sum += w * chi2_cdf(x, k + 2 * static_cast<int>(j));
        mass += w;
        if (w < kTail * 1e-3 && j < mode) break;
    }
    for (long j = mode + 1;; ++j) {
        const double w = std::exp(log_weight(j));
        sum += w * chi2_cdf(x, k + 2 * static_cast<int>(j));
        mass += w;
        if (1.0 - mass < kTail || (w < kTail * 1e-3 && static_cast<double>(j) > mean)) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double chi2_test_power(double alpha, int k, double gamma) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    return 1.0 - noncentral_chi2_cdf(chi2_quantile(1.0 - alpha, k), k, gamma);
}

} // namespace pplr
