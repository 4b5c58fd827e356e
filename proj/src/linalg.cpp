#include "adt/linalg.hpp"

#include <cmath>
#include <string>

#include "adt/errors.hpp"

namespace adt::linalg {

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

VectorXd kron(const VectorXd& a, const VectorXd& b) {
    VectorXd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

namespace {

Eigen::SelfAdjointEigenSolver<MatrixXd> eig_checked(const MatrixXd& m, const char* what) {
    if (m.rows() != m.cols())
        throw DomainError(std::string(what) + ": matrix is not square");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw SingularError(std::string(what) + ": eigendecomposition failed");
    return es;
}

void require_pd(const Eigen::VectorXd& lambda, const char* what) {
    const double lmax = lambda.maxCoeff();
    const double lmin = lambda.minCoeff();
    if (!(lmax > 0.0) || lmin <= 0.0 || lmin < kRcondLimit * lmax)
        throw SingularError(std::string(what) +
                            ": matrix is singular or not positive definite (rcond below 1e-12)");
}

}  // namespace

MatrixXd spd_inverse(const MatrixXd& m, const char* what) {
    auto es = eig_checked(m, what);
    require_pd(es.eigenvalues(), what);
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

MatrixXd spd_solve(const MatrixXd& m, const MatrixXd& rhs, const char* what) {
    auto es = eig_checked(m, what);
    require_pd(es.eigenvalues(), what);
    return es.eigenvectors() *
           es.eigenvalues().cwiseInverse().asDiagonal() *
           (es.eigenvectors().transpose() * rhs);
}

double spd_logdet(const MatrixXd& m, const char* what) {
    auto es = eig_checked(m, what);
    require_pd(es.eigenvalues(), what);
    return es.eigenvalues().array().log().sum();
}

MatrixXd psd_pseudo_inverse(const MatrixXd& m, int* rank_out, double rel_tol) {
    auto es = eig_checked(m, "psd_pseudo_inverse");
    const VectorXd& lam = es.eigenvalues();
    const double tol = rel_tol * std::max(lam.maxCoeff(), 0.0);
    VectorXd inv = VectorXd::Zero(lam.size());
    int rank = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > tol) {
            inv(i) = 1.0 / lam(i);
            ++rank;
        }
    }
    if (rank_out) *rank_out = rank;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

int symmetric_rank(const MatrixXd& m, double rel_tol) {
    auto es = eig_checked(m, "symmetric_rank");
    const double tol = rel_tol * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) > tol) ++rank;
    return rank;
}

bool in_range(const MatrixXd& m, const VectorXd& c, double rel_tol) {
    auto es = eig_checked(m, "in_range");
    const VectorXd& lam = es.eigenvalues();
    const double tol = 1e-12 * std::max(lam.maxCoeff(), 0.0);
    // Residual of c after projection onto the span of the nonzero eigenvectors.
    VectorXd resid = c;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) > tol) {
            const VectorXd q = es.eigenvectors().col(i);
            resid -= q.dot(c) * q;
        }
    }
    return resid.norm() <= rel_tol * std::max(c.norm(), 1e-300);
}

MatrixXd psd_sqrt(const MatrixXd& m) {
    auto es = eig_checked(m, "psd_sqrt");
    VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

bool is_symmetric_psd(const MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) return false;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, m.cwiseAbs().maxCoeff()))
        return false;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
}

}  // namespace adt::linalg
