#include "adt/model_core.hpp"

#include <cmath>

#include "adt/errors.hpp"
#include "adt/linalg.hpp"

namespace adt {

using linalg::kron;

MatrixXd build_time_matrix(std::span<const double> times, const Basis& time_basis) {
    if (times.empty()) throw DomainError("build_time_matrix: empty time plan");
    if (time_basis.arity() != 1)
        throw DomainError("build_time_matrix: time basis must have one covariate");
    MatrixXd F2(times.size(), time_basis.dimension());
    for (size_t j = 0; j < times.size(); ++j) {
        if (!time_basis.contains1(times[j]))
            throw DomainError("build_time_matrix: time point outside the time region");
        F2.row(j) = time_basis.eval1(times[j]).transpose();
    }
    return F2;
}

MatrixXd build_stress_matrix(const std::vector<VectorXd>& settings,
                             const ProductModel& model) {
    if (settings.empty()) throw DomainError("build_stress_matrix: no settings");
    MatrixXd F1(settings.size(), model.p1());
    for (size_t i = 0; i < settings.size(); ++i) {
        if (settings[i].size() != model.stress_arity())
            throw DomainError("build_stress_matrix: stress vector dimension mismatch");
        if (!model.stress_in_region(settings[i]))
            throw DomainError("build_stress_matrix: stress setting outside the region");
        F1.row(i) = model.f1(settings[i]).transpose();
    }
    return F1;
}

MatrixXd response_covariance(const MatrixXd& F2, const VarianceComponents& vc) {
    const int k = static_cast<int>(F2.rows());
    if (vc.sigma_gamma.rows() != F2.cols())
        throw DomainError("response_covariance: sigma_gamma dimension mismatch");
    MatrixXd V = F2 * vc.sigma_gamma * F2.transpose() + vc.sigma_eps.materialize(k);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(V);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DegenerateError("response_covariance: covariance is not positive definite");
    return V;
}

MatrixXd inverse_marginal_info(const MatrixXd& F2, const VarianceComponents& vc) {
    const int k = static_cast<int>(F2.rows());
    if (F2.cols() > F2.rows())
        throw SingularError("inverse_marginal_info: more parameters than time points");
    MatrixXd Se_inv_F2 = linalg::spd_solve(vc.sigma_eps.materialize(k), F2,
                                           "inverse_marginal_info: Sigma_eps");
    MatrixXd A = F2.transpose() * Se_inv_F2;
    return linalg::spd_inverse(A, "inverse_marginal_info: F2' Sigma_eps^-1 F2") +
           vc.sigma_gamma;
}

double log_likelihood(const VectorXd& y, const MatrixXd& F1, const MatrixXd& F2,
                      const MatrixXd& V, const VectorXd& beta) {
    const Eigen::Index n = F1.rows();
    const Eigen::Index k = F2.rows();
    if (y.size() != n * k)
        throw DomainError("log_likelihood: observation vector must have length n*k");
    if (beta.size() != F1.cols() * F2.cols())
        throw DomainError("log_likelihood: beta has wrong length");

    const double logdetV = linalg::spd_logdet(V, "log_likelihood: V");
    MatrixXd Vinv = linalg::spd_inverse(V, "log_likelihood: V");

    // Mean of unit i is F2 * B * f1(x_i) with B the p2 x p1 coefficient matrix.
    MatrixXd B = Eigen::Map<const MatrixXd>(beta.data(), F2.cols(), F1.cols());
    double quad = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        VectorXd r = y.segment(i * k, k) - F2 * (B * F1.row(i).transpose());
        quad += r.dot(Vinv * r);
    }
    const double nk = static_cast<double>(n * k);
    return -0.5 * nk * std::log(2.0 * M_PI) - 0.5 * n * logdetV - 0.5 * quad;
}

VectorXd gls_estimate(const VectorXd& y, const MatrixXd& F1, const MatrixXd& F2,
                      const MatrixXd& V) {
    const Eigen::Index n = F1.rows();
    const Eigen::Index k = F2.rows();
    if (y.size() != n * k)
        throw DomainError("gls_estimate: observation vector must have length n*k");

    MatrixXd G1 = F1.transpose() * F1;
    if (linalg::symmetric_rank(G1, 1e-12) < F1.cols())
        throw SingularError("gls_estimate: stress design matrix F1 is rank deficient");
    MatrixXd Vinv_F2 = linalg::spd_solve(V, F2, "gls_estimate: V");
    MatrixXd G2 = F2.transpose() * Vinv_F2;
    if (linalg::symmetric_rank(G2, 1e-12) < F2.cols())
        throw SingularError("gls_estimate: time design matrix F2 is rank deficient");

    // beta_hat = ((F1'F1)^-1 F1') (x) ((F2'V^-1F2)^-1 F2'V^-1) y, evaluated
    // without forming the Kronecker product: C = sum_i y_i f1(x_i)'.
    MatrixXd C(k, F1.cols());
    C.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
        C += y.segment(i * k, k) * F1.row(i);
    MatrixXd Bhat = linalg::spd_solve(G2, Vinv_F2.transpose() * C, "gls_estimate: M2") *
                    linalg::spd_inverse(G1, "gls_estimate: F1'F1");
    return Eigen::Map<VectorXd>(Bhat.data(), Bhat.size());
}

MatrixXd info_beta(const MatrixXd& F1, const MatrixXd& F2, const MatrixXd& V) {
    MatrixXd M1 = F1.transpose() * F1;
    MatrixXd M2 = F2.transpose() * linalg::spd_solve(V, F2, "info_beta: V");
    return kron(M1, M2);
}

MatrixXd info_beta_inverse(const MatrixXd& F1, const MatrixXd& F2, const MatrixXd& V) {
    MatrixXd M1 = F1.transpose() * F1;
    if (linalg::symmetric_rank(M1, 1e-12) < F1.cols())
        throw SingularError("info_beta_inverse: stress factor F1'F1 is singular");
    MatrixXd M2 = F2.transpose() * linalg::spd_solve(V, F2, "info_beta_inverse: V");
    if (linalg::symmetric_rank(M2, 1e-12) < F2.cols())
        throw SingularError("info_beta_inverse: time factor F2'V^-1F2 is singular");
    return kron(linalg::spd_inverse(M1, "info_beta_inverse: F1'F1"),
                linalg::spd_inverse(M2, "info_beta_inverse: F2'V^-1F2"));
}

MatrixXd VcParametrization::dV(const VectorXd& params, const MatrixXd& F2, int a) const {
    const int k = static_cast<int>(F2.rows());
    if (d_sigma_gamma && d_sigma_eps_dense) {
        return F2 * d_sigma_gamma(params, a) * F2.transpose() +
               d_sigma_eps_dense(params, a, k);
    }
    // Central differences with relative step 1e-5, absolute floor 1e-8.
    const double h = std::max(1e-5 * std::abs(params(a)), 1e-8);
    VectorXd up = params, dn = params;
    up(a) += h;
    dn(a) -= h;
    MatrixXd Vu = response_covariance(F2, rebuild(up));
    MatrixXd Vd = response_covariance(F2, rebuild(dn));
    return (Vu - Vd) / (2.0 * h);
}

VcParametrization vc_sigma_pair(const VarianceComponents& vc) {
    if (vc.sigma_gamma.rows() != 2)
        throw DomainError("vc_sigma_pair: requires a 2x2 sigma_gamma");
    if (!vc.sigma_eps.is_scalar())
        throw DomainError("vc_sigma_pair: requires scalar measurement errors");
    const double s1 = std::sqrt(vc.sigma_gamma(0, 0));
    const double s2 = std::sqrt(vc.sigma_gamma(1, 1));
    const double rho = (s1 > 0 && s2 > 0) ? vc.sigma_gamma(0, 1) / (s1 * s2) : 0.0;

    VcParametrization p;
    p.names = {"sigma1", "sigma2", "rho", "sigma_eps"};
    p.value.resize(4);
    p.value << s1, s2, rho, vc.sigma_eps.sigma_eps();
    p.rebuild = [](const VectorXd& v) {
        return VarianceComponents::from_sigmas(v(0), v(1), v(2), v(3));
    };
    p.d_sigma_gamma = [](const VectorXd& v, int a) {
        const double s1 = v(0), s2 = v(1), rho = v(2);
        MatrixXd d = MatrixXd::Zero(2, 2);
        switch (a) {
            case 0: d << 2 * s1, rho * s2, rho * s2, 0; break;
            case 1: d << 0, rho * s1, rho * s1, 2 * s2; break;
            case 2: d << 0, s1 * s2, s1 * s2, 0; break;
            case 3: break;
        }
        return d;
    };
    p.d_sigma_eps_dense = [](const VectorXd& v, int a, int k) {
        MatrixXd d = MatrixXd::Zero(k, k);
        if (a == 3) d.diagonal().setConstant(2.0 * v(3));
        return d;
    };
    return p;
}

VcParametrization vc_scalar_error(const VarianceComponents& vc) {
    if (!vc.sigma_eps.is_scalar())
        throw DomainError("vc_scalar_error: requires scalar measurement errors");
    MatrixXd sg = vc.sigma_gamma;
    const int p2 = static_cast<int>(sg.rows());
    VcParametrization p;
    p.names = {"sigma_eps"};
    p.value = VectorXd::Constant(1, vc.sigma_eps.sigma_eps());
    p.rebuild = [sg](const VectorXd& v) {
        VarianceComponents out;
        out.sigma_gamma = sg;
        out.sigma_eps = ErrorCov::scalar(v(0));
        return out;
    };
    p.d_sigma_gamma = [p2](const VectorXd&, int) { return MatrixXd::Zero(p2, p2); };
    p.d_sigma_eps_dense = [](const VectorXd& v, int, int k) {
        MatrixXd d = MatrixXd::Zero(k, k);
        d.diagonal().setConstant(2.0 * v(0));
        return d;
    };
    return p;
}

VcParametrization default_vc_parametrization(const VarianceComponents& vc) {
    if (vc.sigma_gamma.rows() == 2 && vc.sigma_eps.is_scalar())
        return vc_sigma_pair(vc);
    return vc_scalar_error(vc);
}

MatrixXd info_varsigma(const MatrixXd& F2, const VcParametrization& param, int n) {
    if (n < 1) throw DomainError("info_varsigma: n must be at least 1");
    const int q = param.size();
    MatrixXd V = response_covariance(F2, param.rebuild(param.value));
    MatrixXd Vinv = linalg::spd_inverse(V, "info_varsigma: V");
    std::vector<MatrixXd> W(q);
    for (int a = 0; a < q; ++a) W[a] = Vinv * param.dV(param.value, F2, a);
    MatrixXd M(q, q);
    for (int a = 0; a < q; ++a)
        for (int b = a; b < q; ++b) {
            M(a, b) = 0.5 * n * (W[a] * W[b]).trace();
            M(b, a) = M(a, b);
        }
    return M;
}

}  // namespace adt
