#pragma once

#include <array>
#include <string>
#include <vector>

#include "adt/design.hpp"
#include "adt/model.hpp"

namespace adt {

// Single-measurement (k = 1) regime: measurements at time t carry variance
// sigma^2(t) = f2(t)' Sigma_gamma f2(t) + sigma_eps^2 and the weighted
// regression function f2(t)/sigma(t) drives the design geometry.
struct WeightedTimeModel {
    Basis time_basis;
    MatrixXd sigma_gamma;
    double sigma_eps2 = 0.0;

    double variance(double t) const;
    double sigma(double t) const;
    VectorXd weighted_basis(double t) const;
};

WeightedTimeModel weighted_time_model(const Scenario& scenario);

// sigma(1)/sigma(0) at the endpoints of the (standardized) time region.
double sigma_ratio(const VarianceComponents& vc, const Basis& time_basis);

// Closed-form optimal weight at t = 1 for extrapolation at t_half > 1 in the
// weighted marginal time model. For t_half <= 1 the interpolation case is
// referred to elfving_solve on the weighted basis.
double pi_star(double t_half, double sigma0, double sigma1);

struct DestructiveResult {
    ApproximateDesign zeta;          // combined (x, t) design
    ApproximateDesign xi_marginal;   // stress marginal
    ApproximateDesign tau_marginal;  // time marginal
    double pi = 0.0;                 // weight at t = 1 (when two-point)
    DesignReport report;
};

// Theorem-style optimal cross-sectional plan: product of the stress-marginal
// c-optimum and the weighted-time-marginal c-optimum, certified on a
// combined grid.
DestructiveResult destructive_optimal_design(const Scenario& scenario,
                                             int grid_per_axis = 101);

struct SensitivityOptions {
    int points = 50;
    double t_half_lo = 0.0, t_half_hi = 0.0;  // 0,0 selects defaults around nominal
    double ratio_lo = 0.0, ratio_hi = 0.0;
};

struct SensitivityCurve {
    std::string axis;  // "t_half" or "sigma_ratio"
    // rows: probe value, eff of the nominal-optimal time marginal, eff of the
    // uniform 2-point marginal, eff of the uniform 6-point marginal.
    std::vector<std::array<double, 4>> rows;
};

// Efficiency of the nominal-optimal plan and uniform benchmarks against the
// locally optimal plan at each probe parameter value.
std::vector<SensitivityCurve> sensitivity_curves(const Scenario& scenario,
                                                 const SensitivityOptions& opts = {});

}  // namespace adt
