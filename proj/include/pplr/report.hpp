#pragma once

#include "pplr/dataio.hpp"
#include "pplr/inference.hpp"
#include "pplr/simulate.hpp"
#include "pplr/solver.hpp"

#include <json.hpp>

#include <ostream>
#include <vector>

namespace pplr {

nlohmann::json to_json(const FitResult& fit, bool include_beta = true);
nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const SimReport& report, bool include_statistics = false);
nlohmann::json to_json(const ProstateReport& report);

// One row per (n, p, delta): L2/L1 loss and C/IC per method, means followed by
// standard deviations, in the column order of the estimation tables. The sd
// columns are dropped when the study ran a single replicate.
void write_estimation_csv(std::ostream& os, const std::vector<SimReport>& reports);

// One row per (n, p, test) with a rejection-rate column per delta.
void write_rejection_csv(std::ostream& os, const std::vector<SimReport>& reports);

// theoretical,empirical
void write_qq_csv(std::ostream& os, const std::vector<QQPoint>& points);

std::string format_number(double v, int digits = 6);

} // namespace pplr
