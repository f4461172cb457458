#pragma once

#include <string>

namespace pplr {

enum class PenaltyFamily { Scad, Mcp, Lasso, None };

const char* to_string(PenaltyFamily family);
PenaltyFamily penalty_family_from_string(const std::string& name);

inline constexpr double kDefaultScadShape = 3.7;
inline constexpr double kDefaultMcpShape = 3.0;

struct PenaltySpec {
    PenaltyFamily family = PenaltyFamily::Scad;
    double lambda = 0.0;
    double a = kDefaultScadShape;

    static PenaltySpec scad(double lambda, double a = kDefaultScadShape) { return {PenaltyFamily::Scad, lambda, a}; }
    static PenaltySpec mcp(double lambda, double a = kDefaultMcpShape) { return {PenaltyFamily::Mcp, lambda, a}; }
    static PenaltySpec lasso(double lambda) { return {PenaltyFamily::Lasso, lambda, 0.0}; }
    static PenaltySpec none() { return {PenaltyFamily::None, 0.0, 0.0}; }

    PenaltySpec with_lambda(double l) const {
        PenaltySpec s = *this;
        s.lambda = l;
        return s;
    }
    bool inactive() const { return family == PenaltyFamily::None || lambda == 0.0; }

    // lambda >= 0 and finite; SCAD needs a > 2, MCP needs a > 1.
    void validate() const;
};

// p_lambda(t) for a magnitude t >= 0.
double penalty_value(const PenaltySpec& spec, double t);

// p'_lambda(t) for a magnitude t >= 0; the sign of the coefficient is the
// caller's business.
double penalty_derivative(const PenaltySpec& spec, double t);

// Global minimiser of  0.5 * w * (z - b)^2 + p_lambda(|b|)  over b.
//
// When the objective is convex (always for Lasso, and for SCAD/MCP once the
// curvature w exceeds the penalty's maximal concavity 1/(a-1) resp. 1/a) the
// piecewise closed form is used. Otherwise every stationary point and region
// boundary is scored and the best one wins; ties go to the larger magnitude.
double scalar_prox(const PenaltySpec& spec, double z, double w);

inline double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

} // namespace pplr
