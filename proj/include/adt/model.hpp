#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adt/basis.hpp"

namespace adt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Covariance of the measurement errors within one unit. The scalar kind is
// sigma_eps^2 * I_k; compound symmetry adds a common off-diagonal correlation.
class ErrorCov {
public:
    enum class Kind { Scalar, CompoundSymmetry, Dense };

    static ErrorCov scalar(double sigma_eps);
    static ErrorCov compound_symmetry(double sigma_eps, double rho_eps);
    static ErrorCov dense(MatrixXd sigma);

    Kind kind() const { return kind_; }
    bool is_scalar() const { return kind_ == Kind::Scalar; }
    double sigma_eps() const { return sigma_eps_; }
    double variance() const { return sigma_eps_ * sigma_eps_; }

    // k x k covariance matrix; throws on dimension mismatch for dense kind.
    MatrixXd materialize(int k) const;

private:
    Kind kind_ = Kind::Scalar;
    double sigma_eps_ = 1.0;
    double rho_eps_ = 0.0;
    MatrixXd dense_;
};

struct VarianceComponents {
    MatrixXd sigma_gamma;  // p2 x p2, symmetric non-negative definite
    ErrorCov sigma_eps;

    // The 2x2 (sigma1, sigma2, rho) random intercept/slope parametrization
    // with homoscedastic independent errors.
    static VarianceComponents from_sigmas(double sigma1, double sigma2, double rho,
                                          double sigma_eps);

    void validate(int p2) const;
};

// Product-type regression model f(x, t) = f1(x) (x) f2(t), where f1 is itself
// the Kronecker product of the per-factor-group stress bases. Random effects
// attach to the constant-stress block only, so their dimension equals p2.
class ProductModel {
public:
    ProductModel(std::vector<Basis> stress_bases, Basis time_basis);

    int p1() const { return p1_; }
    int p2() const { return time_basis_.dimension(); }
    int p() const { return p1_ * p2(); }
    int random_effect_dim() const { return p2(); }
    int stress_arity() const { return stress_arity_; }

    const std::vector<Basis>& stress_bases() const { return stress_bases_; }
    const Basis& time_basis() const { return time_basis_; }

    bool stress_in_region(const VectorXd& x, double tol = 1e-9) const;

    VectorXd f1(const VectorXd& x) const;
    VectorXd f(const VectorXd& x, double t) const;

    // Splits a stacked stress vector into per-group covariate vectors.
    std::vector<VectorXd> split_stress(const VectorXd& x) const;

private:
    std::vector<Basis> stress_bases_;
    Basis time_basis_;
    int p1_ = 1;
    int stress_arity_ = 0;
};

struct TimeGridSpec {
    double delta = 0.05;
    int k = 6;
    bool present = false;
};

// Nominal parameter values, use condition and regions for one planning task.
struct Scenario {
    ProductModel model;
    VectorXd beta;             // lexicographic order, time index fastest
    VarianceComponents varcomps;
    VectorXd use_condition;    // stacked stress covariates, may lie outside the region
    double threshold = 0.0;    // soft-failure threshold y0
    double alpha = 0.5;
    std::vector<double> time_plan;  // nominal measurement times
    TimeGridSpec time_grid;

    void validate() const;
};

}  // namespace adt
