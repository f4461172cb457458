#pragma once

#include "pplr/glm.hpp"
#include "pplr/inference.hpp"
#include "pplr/penalty.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace pplr {

enum class Example { LinearEx1, LogisticEx2 };

struct SimDesign {
    Example example = Example::LinearEx1;
    int n = 100;
    int p = 11;
    double delta = 0.0;
    int n_reps = 200;
    std::uint64_t seed = 20240917;
    double alpha = 0.05;

    void validate() const;
};

// Estimator families compared in the study and the test each one drives.
enum class Method { PPL, PL, OL };

const char* to_string(Method method);
const char* test_name(Method method); // PPLR, PLR, LR
TestMethod test_method(Method method);
Method method_from_string(const std::string& name);

// Stream of independent generators keyed by (seed, replicate, role, attempt);
// no generator state is shared between replicates, so any schedule yields the
// same draws.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t rep_index, std::uint64_t role, std::uint64_t attempt = 0);

// (delta / sqrt(n), 3, 1.5, 2, 1, 0, ..., 0)
Vector true_coefficients(const SimDesign& design);

struct Replicate {
    Dataset data;
    Vector beta_true;
    int attempt = 0;
};

Replicate generate(const SimDesign& design, int rep_index, int attempt = 0);

struct Metrics {
    double l2 = 0.0;
    double l1 = 0.0;
    int correct_zeros = 0;   // C
    int incorrect_zeros = 0; // IC
};

Metrics metrics(const Vector& beta_hat, const Vector& beta_true);

struct Summary {
    double mean = 0.0;
    std::optional<double> sd; // absent with a single replicate
};

struct QQPoint {
    double theoretical = 0.0;
    double empirical = 0.0;
};

struct MethodReport {
    Method method = Method::PPL;
    Summary l2, l1, c, ic;
    double rejection_rate = 0.0;
    int rejections = 0;
    int replicates = 0;
    int nonconverged = 0;
    double mean_lambda = 0.0;
    std::vector<double> statistics; // in replicate order
    std::vector<QQPoint> qq;
};

struct SimReport {
    SimDesign design;
    std::vector<MethodReport> methods;
    int failures = 0; // replicates abandoned after all retries
    int retries = 0;  // fresh substreams drawn because of separation/fit failure
};

struct StudyOptions {
    TuneOptions tune;
    PenaltySpec penalty = PenaltySpec::scad(0.0);
    int threads = 1;
    int max_attempts = 10;
};

SimReport run_study(const SimDesign& design, const std::set<Method>& methods, const StudyOptions& opts = {});

// (chi2_d quantile at (i - 0.5) / m, i-th smallest statistic) for i = 1..m.
std::vector<QQPoint> qq_data(const std::vector<double>& statistics, int d);

// Kolmogorov-Smirnov distance between the empirical CDF of `statistics` and chi2_d.
double ks_distance_chi2(const std::vector<double>& statistics, int d);

// Threads requested through PPLR_THREADS, else hardware concurrency.
int default_threads();

} // namespace pplr
