#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "adt/errors.hpp"

namespace adt::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Tableau {
    const MatrixXd& A;        // m x n, original columns
    VectorXd b;               // m, non-negative
    int m, n;
    std::vector<int> basis;   // column indices; >= n means artificial
    VectorXd xb;              // basic variable values

    Eigen::PartialPivLU<MatrixXd> factor_basis() const {
        MatrixXd B(m, m);
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n) {
                B.col(i) = A.col(basis[i]);
            } else {
                B.col(i).setZero();
                B(basis[i] - n, i) = 1.0;
            }
        }
        return Eigen::PartialPivLU<MatrixXd>(B);
    }

    VectorXd column(int j) const {
        if (j < n) return A.col(j);
        VectorXd e = VectorXd::Zero(m);
        e(j - n) = 1.0;
        return e;
    }
};

// One simplex phase over the given costs. `allow` limits which columns may
// enter. Returns false when the iteration cap is hit.
bool run_phase(Tableau& t, const VectorXd& cost, const std::vector<char>& allow,
               double tol, long max_iter, long& iters, bool& bounded) {
    const int ncols = static_cast<int>(cost.size());
    long stall = 0;
    double last_obj = std::numeric_limits<double>::infinity();

    while (iters < max_iter) {
        ++iters;
        auto lu = t.factor_basis();
        VectorXd cb(t.m);
        for (int i = 0; i < t.m; ++i) cb(i) = cost(t.basis[i]);
        t.xb = lu.solve(t.b);
        VectorXd y = lu.transpose().solve(cb);

        const double obj = cb.dot(t.xb);
        if (obj < last_obj - 1e-13 * (1.0 + std::abs(last_obj))) {
            last_obj = obj;
            stall = 0;
        } else {
            ++stall;
        }
        const bool bland = stall > 2L * (t.m + 8);

        std::vector<char> in_basis(ncols, 0);
        for (int bi : t.basis) in_basis[bi] = 1;

        int enter = -1;
        double best = -tol;
        for (int j = 0; j < ncols; ++j) {
            if (!allow[j] || in_basis[j]) continue;
            const double rj = cost(j) - y.dot(t.column(j));
            if (rj < -tol) {
                if (bland) { enter = j; break; }
                if (rj < best) { best = rj; enter = j; }
            }
        }
        if (enter < 0) { bounded = true; return true; }  // optimal

        VectorXd d = lu.solve(t.column(enter));
        int leave = -1;
        double min_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < t.m; ++i) {
            if (d(i) > tol) {
                const double ratio = std::max(t.xb(i), 0.0) / d(i);
                if (ratio < min_ratio - 1e-14 ||
                    (ratio < min_ratio + 1e-14 &&
                     (leave < 0 || t.basis[i] < t.basis[leave]))) {
                    min_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) { bounded = false; return true; }  // unbounded direction
        t.basis[leave] = enter;
    }
    return false;
}

}  // namespace

LpResult solve_lp(const MatrixXd& A, const VectorXd& b_in, const VectorXd& obj,
                  double tol, long max_iter) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b_in.size() != m || obj.size() != n)
        throw DomainError("solve_lp: dimension mismatch");

    // Orient rows so the right-hand side is non-negative.
    MatrixXd Aw = A;
    VectorXd b = b_in;
    for (int i = 0; i < m; ++i) {
        if (b(i) < 0.0) {
            b(i) = -b(i);
            Aw.row(i) = -Aw.row(i);
        }
    }

    Tableau t{Aw, b, m, n, {}, VectorXd()};
    t.basis.resize(m);
    for (int i = 0; i < m; ++i) t.basis[i] = n + i;  // artificials

    LpResult res;

    // Phase 1: drive artificials to zero.
    VectorXd cost1 = VectorXd::Zero(n + m);
    cost1.tail(m).setOnes();
    std::vector<char> allow1(n + m, 1);
    bool bounded = true;
    if (!run_phase(t, cost1, allow1, tol, max_iter, res.iterations, bounded))
        throw ConvergenceError("solve_lp: phase 1 iteration limit reached");
    {
        auto lu = t.factor_basis();
        t.xb = lu.solve(t.b);
        double art = 0.0;
        for (int i = 0; i < m; ++i)
            if (t.basis[i] >= n) art += std::abs(t.xb(i));
        if (art > 1e-7) {
            res.feasible = false;
            return res;
        }
    }

    // Phase 2: original objective; artificial columns may not re-enter.
    VectorXd cost2 = VectorXd::Zero(n + m);
    cost2.head(n) = obj;
    std::vector<char> allow2(n + m, 1);
    for (int j = n; j < n + m; ++j) allow2[j] = 0;
    if (!run_phase(t, cost2, allow2, tol, max_iter, res.iterations, bounded))
        throw ConvergenceError("solve_lp: phase 2 iteration limit reached");

    res.feasible = true;
    res.bounded = bounded;
    if (!bounded) return res;

    auto lu = t.factor_basis();
    t.xb = lu.solve(t.b);
    res.x = VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) res.x(t.basis[i]) = std::max(t.xb(i), 0.0);
    res.objective = obj.dot(res.x);
    return res;
}

}  // namespace adt::detail
