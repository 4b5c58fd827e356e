#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adt/model.hpp"

namespace adt {

// Marginal design matrix for the time variable: row j equals f2(t_j).
MatrixXd build_time_matrix(std::span<const double> times, const Basis& time_basis);

// Marginal design matrix for the stress variables: row i equals f1(x_i).
MatrixXd build_stress_matrix(const std::vector<VectorXd>& settings,
                             const ProductModel& model);

// Per-unit response covariance V = F2 Sigma_gamma F2' + Sigma_eps.
MatrixXd response_covariance(const MatrixXd& F2, const VarianceComponents& vc);

// (F2' V^-1 F2)^-1 computed through the decomposition
// (F2' Sigma_eps^-1 F2)^-1 + Sigma_gamma, which avoids forming V.
MatrixXd inverse_marginal_info(const MatrixXd& F2, const VarianceComponents& vc);

// Gaussian log-likelihood of stacked observations y (unit-major, length n*k)
// under mean (F1 (x) F2) beta and covariance I_n (x) V.
double log_likelihood(const VectorXd& y, const MatrixXd& F1, const MatrixXd& F2,
                      const MatrixXd& V, const VectorXd& beta);

// Kronecker-factorized GLS estimator of beta.
VectorXd gls_estimate(const VectorXd& y, const MatrixXd& F1, const MatrixXd& F2,
                      const MatrixXd& V);

// Information matrix of beta, M = (F1'F1) (x) (F2' V^-1 F2), and its inverse.
MatrixXd info_beta(const MatrixXd& F1, const MatrixXd& F2, const MatrixXd& V);
MatrixXd info_beta_inverse(const MatrixXd& F1, const MatrixXd& F2, const MatrixXd& V);

// A differentiable parametrization of the variance components. `rebuild`
// produces the components at a parameter vector; `d_sigma_gamma` and
// `d_sigma_eps` give analytic derivatives when available (index a), otherwise
// central differences of `rebuild` are used with relative step 1e-5 and
// absolute floor 1e-8.
struct VcParametrization {
    std::vector<std::string> names;
    VectorXd value;
    std::function<VarianceComponents(const VectorXd&)> rebuild;
    std::function<MatrixXd(const VectorXd&, int)> d_sigma_gamma;  // may be null
    std::function<MatrixXd(const VectorXd&, int, int)> d_sigma_eps_dense;  // (params, a, k)

    int size() const { return static_cast<int>(value.size()); }
    MatrixXd dV(const VectorXd& params, const MatrixXd& F2, int a) const;
};

// (sigma1, sigma2, rho, sigma_eps) for the 2x2 random intercept/slope model.
VcParametrization vc_sigma_pair(const VarianceComponents& vc);

// Single parameter sigma_eps with Sigma_gamma held fixed.
VcParametrization vc_scalar_error(const VarianceComponents& vc);

// (sigma1, sigma2, rho, sigma_eps) when the random-effect dimension is 2 and
// errors are scalar, sigma_eps alone otherwise.
VcParametrization default_vc_parametrization(const VarianceComponents& vc);

// Fisher information block for the variance parameters,
// M_varsigma[a,b] = (n/2) tr(V^-1 dV/da V^-1 dV/db).
MatrixXd info_varsigma(const MatrixXd& F2, const VcParametrization& param, int n);

}  // namespace adt
