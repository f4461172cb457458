#pragma once

#include "pplr/glm.hpp"
#include "pplr/inference.hpp"
#include "pplr/penalty.hpp"

#include <string>
#include <vector>

namespace pplr {

struct TableSpec {
    std::string path;
    std::string response_column;
    std::vector<std::string> predictor_columns; // empty: every other column, in file order
    Family family = Family::GaussianIdentity;
};

// Comma-separated, header row, '.' decimal separator. Errors name the
// offending row and column.
Dataset load_csv(const TableSpec& spec);

// Centering and scaling applied by standardize(); maps coefficients fitted on
// the standardized scale back to the original one.
struct Standardization {
    Vector means;
    Vector scales;
    double y_mean = 0.0; // 0 unless the response was centered

    // Slopes on the original scale.
    Vector original_slopes(const Vector& beta_std) const;
    // Intercept on the original scale.
    double original_intercept(const Vector& beta_std) const;
    // Fitted linear predictor for raw covariates.
    Vector predict(const Matrix& X_raw, const Vector& beta_std) const;
};

struct Standardized {
    Dataset data;
    Standardization transform;
};

// Columns centered and scaled so that sum_i x_ij^2 = n; a Gaussian response is
// centered. A zero-variance column is an error naming the column.
Standardized standardize(const Dataset& data);

// R^2 = 1 - RSS / TSS around the mean of y.
double r_squared(const Dataset& data, const Vector& beta);

std::string default_prostate_path();
TableSpec prostate_table(const std::string& path = default_prostate_path());

struct CoefficientRow {
    std::string name;
    double ls = 0.0;
    double pl = 0.0;
    double ppl = 0.0;
};

struct PValueRow {
    std::string name;
    double lr = 1.0;
    double plr = 1.0;
    double pplr = 1.0;
    double lr_statistic = 0.0;
    double plr_statistic = 0.0;
    double pplr_statistic = 0.0;
};

struct ProstateReport {
    std::vector<CoefficientRow> coefficients;
    std::vector<PValueRow> p_values;
    double r2_ls = 0.0;
    double r2_pl = 0.0;
    double r2_ppl = 0.0;
    double lambda_pl = 0.0;
    double lambda_ppl = 0.0;
    std::string ppl_unpenalized;
    bool converged = true;
};

// LS, penalized and partially penalized (ppl_unpenalized left unpenalized)
// fits on the standardized data, then per-predictor LR / PLR / PPLR tests;
// each PPLR test leaves its own predictor unpenalized.
ProstateReport prostate_analysis(const Dataset& raw, const PenaltySpec& penalty,
                                 const std::string& ppl_unpenalized = "svi", const TuneOptions& tune = {});

} // namespace pplr
