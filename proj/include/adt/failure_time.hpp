#pragma once

#include <Eigen/Dense>
#include <span>

#include "adt/design.hpp"
#include "adt/model.hpp"
#include "adt/model_core.hpp"

namespace adt {

// Aggregate degradation path and its between-unit variability at the normal
// use condition: mu(t) = delta' f2(t), sigma_u(t)^2 = f2(t)' Sigma_gamma f2(t).
struct UseConditionProfile {
    VectorXd delta;        // aggregate coefficients at x_u
    VectorXd f1_xu;        // f1(x_u), kept for the beta-gradient
    Basis time_basis;
    MatrixXd sigma_gamma;
    double y0 = 0.0;

    double mu(double t) const;
    double mu_prime(double t) const;
    double sigma_u(double t) const;        // throws DegenerateError when zero
    double sigma_u_prime(double t) const;
    double h(double t) const;              // (mu(t) - y0) / sigma_u(t)
    double failure_cdf(double t) const;    // Phi(h(t))
    double h_limit() const;                // lim_{t->inf} h(t)
    double alpha_max() const;
};

UseConditionProfile use_profile(const Scenario& scenario);

enum class QuantileStatus { Ok, AtZero, Infinite };

struct QuantileResult {
    QuantileStatus status = QuantileStatus::Ok;
    double t = 0.0;
    double c0 = 0.0;            // 1 / h'(t_alpha)
    VectorXd grad_beta;         // f(x_u, t_alpha)
    VectorXd grad_varsigma;     // -z_alpha * d sigma_u / d varsigma, when requested

    bool ok() const { return status == QuantileStatus::Ok; }
};

// Solves h(t_alpha) = z_alpha. Straight-line paths use the quadratic closed
// form with the ascending root; other monotone h fall back to bisection with
// bracket expansion. Degenerate quantiles return marker results.
QuantileResult quantile(const UseConditionProfile& profile, double alpha);
QuantileResult quantile(const UseConditionProfile& profile, double alpha,
                        const VcParametrization& param);

VectorXd gradient_varsigma(const UseConditionProfile& profile, double alpha,
                           const VcParametrization& param);

struct AvarBreakdown {
    double total = 0.0;
    double beta_term = 0.0;      // c0^2 c_b' M_beta^-1 c_b
    double varsigma_term = 0.0;  // c0^2 c_s' M_s^-1 c_s (zero for the median)
    double c0 = 0.0;
    double t_alpha = 0.0;
    bool feasible = true;
};

// Standardized (per-unit) asymptotic variance of the quantile estimator under
// stress design xi and the given repeated-measurement time plan.
AvarBreakdown avar_quantile_detail(const Scenario& scenario, const ApproximateDesign& xi,
                                   std::span<const double> time_plan, double alpha);
double avar_quantile(const Scenario& scenario, const ApproximateDesign& xi,
                     std::span<const double> time_plan, double alpha);

// Ratio of standardized asymptotic variances, reference over candidate.
double efficiency_avar(const Scenario& scenario, const ApproximateDesign& candidate,
                       const ApproximateDesign& reference,
                       std::span<const double> time_plan, double alpha);

}  // namespace adt
