#pragma once

#include <Eigen/Dense>

namespace adt::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Reciprocal-condition threshold below which symmetric solves are refused.
inline constexpr double kRcondLimit = 1e-12;

MatrixXd kron(const MatrixXd& a, const MatrixXd& b);
VectorXd kron(const VectorXd& a, const VectorXd& b);

// Inverse of a symmetric positive definite matrix. Throws SingularError when
// the matrix is indefinite or its reciprocal condition number falls below
// kRcondLimit; `what` names the offending matrix in the message.
MatrixXd spd_inverse(const MatrixXd& m, const char* what);
MatrixXd spd_solve(const MatrixXd& m, const MatrixXd& rhs, const char* what);
double spd_logdet(const MatrixXd& m, const char* what);

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix; eigenvalues below
// rel_tol * lambda_max are treated as zero. Reports the numerical rank.
MatrixXd psd_pseudo_inverse(const MatrixXd& m, int* rank_out = nullptr,
                            double rel_tol = 1e-12);

int symmetric_rank(const MatrixXd& m, double rel_tol = 1e-10);

// Whether c lies in the range (column space) of symmetric PSD m.
bool in_range(const MatrixXd& m, const VectorXd& c, double rel_tol = 1e-8);

// Symmetric PSD square root (for sampling from N(0, m)).
MatrixXd psd_sqrt(const MatrixXd& m);

bool is_symmetric_psd(const MatrixXd& m, double tol = 1e-10);

}  // namespace adt::linalg
