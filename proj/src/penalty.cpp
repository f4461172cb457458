#include "pplr/penalty.hpp"
#include "pplr/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pplr {

const char* to_string(PenaltyFamily family) {
    switch (family) {
    case PenaltyFamily::Scad: return "scad";
    case PenaltyFamily::Mcp: return "mcp";
    case PenaltyFamily::Lasso: return "lasso";
    case PenaltyFamily::None: return "none";
    }
    return "unknown";
}

PenaltyFamily penalty_family_from_string(const std::string& name) {
    if (name == "scad") return PenaltyFamily::Scad;
    if (name == "mcp") return PenaltyFamily::Mcp;
    if (name == "lasso") return PenaltyFamily::Lasso;
    if (name == "none") return PenaltyFamily::None;
    throw ContractViolation("unknown penalty '" + name + "' (expected scad, mcp, lasso or none)");
}

void PenaltySpec::validate() const {
    require(std::isfinite(lambda) && lambda >= 0.0, "penalty lambda must be finite and >= 0");
    if (family == PenaltyFamily::Scad) require(a > 2.0, "SCAD shape parameter a must exceed 2");
    if (family == PenaltyFamily::Mcp) require(a > 1.0, "MCP shape parameter a must exceed 1");
}

double penalty_value(const PenaltySpec& spec, double t) {
    require(t >= 0.0, "penalty_value: magnitude must be >= 0");
    const double l = spec.lambda;
    const double a = spec.a;
    switch (spec.family) {
    case PenaltyFamily::None: return 0.0;
    case PenaltyFamily::Lasso: return l * t;
    case PenaltyFamily::Scad:
        if (t <= l) return l * t;
        if (t <= a * l) return -(t * t - 2.0 * a * l * t + l * l) / (2.0 * (a - 1.0));
        return (a + 1.0) * l * l / 2.0;
    case PenaltyFamily::Mcp:
        if (t <= a * l) return l * t - t * t / (2.0 * a);
        return a * l * l / 2.0;
    }
    return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double t) {
    require(t >= 0.0, "penalty_derivative: magnitude must be >= 0");
    const double l = spec.lambda;
    const double a = spec.a;
    switch (spec.family) {
    case PenaltyFamily::None: return 0.0;
    case PenaltyFamily::Lasso: return l;
    case PenaltyFamily::Scad:
        if (t <= l) return l;
        return std::max(a * l - t, 0.0) / (a - 1.0);
    case PenaltyFamily::Mcp: return std::max(l - t / a, 0.0);
    }
    return 0.0;
}

namespace {

double prox_objective(const PenaltySpec& spec, double z, double w, double b) {
    const double d = z - b;
    return 0.5 * w * d * d + penalty_value(spec, std::abs(b));
}

// Best of a set of candidates for z >= 0; later (larger) candidates win ties.
template <std::size_t N>
double pick_best(const PenaltySpec& spec, double z, double w, const std::array<double, N>& cands) {
    double best = 0.0;
    double best_val = prox_objective(spec, z, w, 0.0);
    for (double b : cands) {
        const double v = prox_objective(spec, z, w, b);
        if (v <= best_val) {
            best_val = v;
            best = b;
        }
    }
    return best;
}

double scad_prox_nonneg(const PenaltySpec& spec, double z, double w) {
    const double l = spec.lambda;
    const double a = spec.a;
    const double denom = w * (a - 1.0) - 1.0;
    if (denom > 0.0) {
        if (z <= l + l / w) return std::max(z - l / w, 0.0);
        if (z <= a * l) return (w * z * (a - 1.0) - a * l) / denom;
        return z;
    }
    // Middle region is concave (or flat) in b: its minimum sits on an endpoint.
    const std::array<double, 4> cands{
        std::clamp(z - l / w, 0.0, l),
        l,
        a * l,
        std::max(z, a * l),
    };
    return pick_best(spec, z, w, cands);
}

double mcp_prox_nonneg(const PenaltySpec& spec, double z, double w) {
    const double l = spec.lambda;
    const double a = spec.a;
    const double denom = w - 1.0 / a;
    if (denom > 0.0) {
        if (z <= a * l) return std::max(w * z - l, 0.0) / denom;
        return z;
    }
    const std::array<double, 2> cands{a * l, std::max(z, a * l)};
    return pick_best(spec, z, w, cands);
}

} // namespace

double scalar_prox(const PenaltySpec& spec, double z, double w) {
    require(w > 0.0 && std::isfinite(w), "scalar_prox: curvature weight must be positive");
    if (spec.inactive()) return z;
    const double mag = std::abs(z);
    double b = 0.0;
    switch (spec.family) {
    case PenaltyFamily::None: return z;
    case PenaltyFamily::Lasso: return soft_threshold(z, spec.lambda / w);
    case PenaltyFamily::Scad: b = scad_prox_nonneg(spec, mag, w); break;
    case PenaltyFamily::Mcp: b = mcp_prox_nonneg(spec, mag, w); break;
    }
    return z < 0.0 ? -b : b;
}

} // namespace pplr
