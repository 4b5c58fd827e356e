#pragma once

#include <vector>

#include "adt/design.hpp"
#include "adt/model.hpp"

namespace adt {

// Equidistant candidate grid {0, dt, ..., 1} with per-point weight cap 1/k.
struct TimeGrid {
    double delta = 0.05;
    int k = 6;
    int J = 20;
    std::vector<double> points;

    static TimeGrid make(double delta, int k);
    double cap() const { return 1.0 / k; }
};

struct TimePlanOptions {
    long max_iter = 100000;
    double tol = 1e-6;            // certificate gap tolerance
    double cap_override = 0.0;    // > 0 replaces the 1/k cap (study use only)
    std::vector<double>* trace = nullptr;  // per-iteration criterion values
};

struct TimePlanResult {
    ApproximateDesign tau;             // optimal weights restricted to the support
    std::vector<double> profile;       // weights over the whole grid
    DesignReport report;
    double t_half = 0.0;
};

// Cap-constrained c-optimal repeated-measurement plan for extrapolation at
// the median failure time in the fixed-effect marginal time model, found by
// a multiplicative algorithm with cap clipping and proportional
// redistribution. The result does not depend on Sigma_gamma.
TimePlanResult optimal_time_plan(const Scenario& scenario, const TimeGrid& grid,
                                 const TimePlanOptions& opts = {});

// Rounds the optimal weights to an exact k-point plan with weights 1/k by
// transferring partial boundary weight to the heavier boundary point
// (ties break toward the earlier time).
std::vector<double> adjust_to_exact_plan(const ApproximateDesign& tau,
                                         const TimeGrid& grid);

// Efficiency of tau0 against tau_star for extrapolation at the median in the
// marginal mixed-effects time model (Sigma_gamma included); a weighted plan
// with k measurements contributes (k/sigma_eps^2) sum pi_j f2 f2'.
double time_plan_efficiency(const ApproximateDesign& tau0,
                            const ApproximateDesign& tau_star,
                            const Scenario& scenario, int k);

// Criterion c' M2^-1 c in the mixed marginal time model for a weighted plan.
double mixed_time_criterion(const ApproximateDesign& tau, const Scenario& scenario,
                            int k, const VectorXd& c);

}  // namespace adt
