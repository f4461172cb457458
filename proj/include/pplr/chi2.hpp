#pragma once

namespace pplr {

// P(k/2, x/2): central chi-square CDF with k degrees of freedom.
double chi2_cdf(double x, int k);

// Upper tail 1 - chi2_cdf, computed directly so small p-values keep precision.
double chi2_sf(double x, int k);

// Inverse of chi2_cdf in x, for probability in [0, 1).
double chi2_quantile(double prob, int k);

// Non-central chi-square CDF as a Poisson(gamma/2) mixture of central CDFs
// with k + 2j degrees of freedom; the series stops once the neglected Poisson
// mass drops below 1e-12.
double noncentral_chi2_cdf(double x, int k, double gamma);

// Asymptotic power 1 - F(q_{1-alpha}; k, gamma) of a level-alpha chi-square test.
double chi2_test_power(double alpha, int k, double gamma);

} // namespace pplr
