#pragma once

#include <Eigen/Dense>

namespace adt::detail {

struct LpResult {
    bool feasible = false;
    bool bounded = true;
    double objective = 0.0;
    Eigen::VectorXd x;
    long iterations = 0;
};

// Minimizes obj'x subject to A x = b, x >= 0, by a dense two-phase revised
// simplex. Intended for problems with few rows and many columns; the basis
// is refactorized every iteration for numerical robustness.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& obj, double tol = 1e-10,
                  long max_iter = 200000);

}  // namespace adt::detail
