#pragma once

#include "pplr/chi2.hpp"
#include "pplr/glm.hpp"
#include "pplr/penalty.hpp"
#include "pplr/solver.hpp"

#include <optional>
#include <string>
#include <variant>

namespace pplr {

enum class TestMethod { PPLR, PLR, OLR };

const char* to_string(TestMethod method);
TestMethod test_method_from_string(const std::string& name);

struct ZeroSubset {
    IndexSet indices;
};

// H0: A beta = 0 with orthonormal rows (A A^T = I_d).
struct LinearConstraint {
    Matrix A;
};

using HypothesisSpec = std::variant<ZeroSubset, LinearConstraint>;

struct TestReport {
    TestMethod method = TestMethod::PPLR;
    double statistic = 0.0; // clamped at 0 when within -1e-8
    double raw_statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    double lambda_used = 0.0;
    FitResult full_fit;
    FitResult null_fit;
    bool converged = true;
};

struct TestOptions {
    // Fixed tuning parameter; when unset lambda is chosen by BIC on the
    // full-space fit and reused for the null fit.
    std::optional<double> lambda;
    TuneOptions tune;
    // Extra unpenalized coordinates beyond the tested ones (PPLR only).
    IndexSet extra_unpenalized;
};

// Partial penalized likelihood ratio: the tested coordinates (plus any extra
// unpenalized ones) carry no penalty, everything else is penalized.
TestReport pplr_test(const Dataset& data, const ZeroSubset& hypothesis, const PenaltySpec& penalty,
                     const TestOptions& opts = {});

// Fully penalized likelihood ratio: every coordinate penalized in both fits.
TestReport plr_test(const Dataset& data, const ZeroSubset& hypothesis, const PenaltySpec& penalty,
                    const TestOptions& opts = {});

// Classical likelihood ratio between unpenalized MLEs. Requires n > p; throws
// FitError when the MLE does not exist (singular design or separation).
TestReport olr_test(const Dataset& data, const ZeroSubset& hypothesis, const TestOptions& opts = {});

TestReport run_test(TestMethod method, const Dataset& data, const ZeroSubset& hypothesis,
                    const PenaltySpec& penalty, const TestOptions& opts = {});

// Orthonormal completion of A: A_tilde = [A; B] with B B^T = I, A B^T = 0.
struct LinearTransform {
    Matrix A_tilde; // p x p, orthogonal
    int d = 0;

    // beta_tilde = A_tilde * beta and back.
    Vector to_transformed(const Vector& beta) const { return A_tilde * beta; }
    Vector to_original(const Vector& beta_tilde) const { return A_tilde.transpose() * beta_tilde; }
    // X_tilde = X A_tilde^T, so that X beta = X_tilde beta_tilde.
    Dataset apply(const Dataset& data) const;
};

LinearTransform linear_transform(const Matrix& A);

// Tests H0: A beta = 0 by reparametrising and testing the first d
// transformed coordinates.
TestReport linear_test(TestMethod method, const Dataset& data, const LinearConstraint& hypothesis,
                       const PenaltySpec& penalty, const TestOptions& opts = {});

TestReport run_test(TestMethod method, const Dataset& data, const HypothesisSpec& hypothesis,
                    const PenaltySpec& penalty, const TestOptions& opts = {});

struct FisherBlocks {
    Matrix C11, C12, C21, C22, C11_2;
};

// Partition of the active-set Fisher information with the tested
// coordinates first; C11_2 is the Schur complement C11 - C12 C22^{-1} C21.
FisherBlocks fisher_blocks(const Dataset& data, const Vector& beta, const IndexSet& active, const IndexSet& tested);

// gamma = delta^T C11_2 delta.
double noncentral_param(const Dataset& data, const Vector& beta, const IndexSet& active, const IndexSet& tested,
                        const Vector& delta);

} // namespace pplr
