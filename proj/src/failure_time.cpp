#include "adt/failure_time.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "adt/errors.hpp"
#include "adt/linalg.hpp"
#include "adt/stats.hpp"

namespace adt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double UseConditionProfile::mu(double t) const {
    return delta.dot(time_basis.eval1(t));
}

double UseConditionProfile::mu_prime(double t) const {
    return delta.dot(time_basis.deriv1(t));
}

double UseConditionProfile::sigma_u(double t) const {
    VectorXd f2 = time_basis.eval1(t);
    const double v = f2.dot(sigma_gamma * f2);
    if (!(v > 0.0))
        throw DegenerateError("sigma_u: variance of the mean degradation path is zero at t=" +
                              std::to_string(t));
    return std::sqrt(v);
}

double UseConditionProfile::sigma_u_prime(double t) const {
    VectorXd f2 = time_basis.eval1(t);
    VectorXd df2 = time_basis.deriv1(t);
    return df2.dot(sigma_gamma * f2) / sigma_u(t);
}

double UseConditionProfile::h(double t) const {
    return (mu(t) - y0) / sigma_u(t);
}

double UseConditionProfile::failure_cdf(double t) const {
    return normal_cdf(h(t));
}

double UseConditionProfile::h_limit() const {
    if (time_basis.kind() == Basis::Kind::SimpleLinear) {
        const double g22 = sigma_gamma(1, 1);
        const double d2 = delta(1);
        if (g22 > 0.0) return d2 / std::sqrt(g22);
        if (d2 > 0.0) return kInf;
        if (d2 < 0.0) return -kInf;
        return h(0.0);
    }
    // General monotone paths: evaluate far beyond any practical horizon.
    return h(std::ldexp(1.0, 40));
}

double UseConditionProfile::alpha_max() const {
    return normal_cdf(h_limit());
}

UseConditionProfile use_profile(const Scenario& scenario) {
    scenario.validate();
    UseConditionProfile p{VectorXd(), scenario.model.f1(scenario.use_condition),
                          scenario.model.time_basis(), scenario.varcomps.sigma_gamma,
                          scenario.threshold};
    // delta_s = sum_r f_{1r}(x_u) beta_{rs}: contract beta with f1(x_u).
    const int p1 = scenario.model.p1();
    const int p2 = scenario.model.p2();
    MatrixXd B = Eigen::Map<const MatrixXd>(scenario.beta.data(), p2, p1);
    p.delta = B * p.f1_xu;
    return p;
}

namespace {

// Ascending-crossing solutions of h(t) = z for the straight-line path.
QuantileResult solve_linear_quantile(const UseConditionProfile& prof, double z) {
    const double d1 = prof.delta(0), d2 = prof.delta(1);
    const double g11 = prof.sigma_gamma(0, 0);
    const double g12 = prof.sigma_gamma(0, 1);
    const double g22 = prof.sigma_gamma(1, 1);
    const double r = d1 - prof.y0;

    if (z == 0.0) {
        // Median: the aggregate path itself crosses the threshold.
        QuantileResult res;
        res.t = (prof.y0 - d1) / d2;
        res.c0 = 1.0 / d2;
        return res;
    }

    const double A = d2 * d2 - z * z * g22;
    const double B = 2.0 * d2 * r - 2.0 * z * z * g12;
    const double C = r * r - z * z * g11;

    double cands[2];
    int ncand = 0;
    const double scale = std::abs(A) + std::abs(B) + std::abs(C);
    if (std::abs(A) <= 1e-14 * scale) {
        if (std::abs(B) > 0.0) cands[ncand++] = -C / B;
    } else {
        double disc = B * B - 4.0 * A * C;
        // The discriminant is a difference of like-sized products near the
        // median; clamp roundoff-negative values to the double root.
        if (disc < 0.0 && disc > -1e-12 * (B * B + std::abs(4.0 * A * C))) disc = 0.0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
            if (std::abs(A) > 0.0) cands[ncand++] = q / A;
            if (std::abs(q) > 0.0) cands[ncand++] = C / q;
        }
    }

    QuantileResult res;
    double best = kInf;
    bool found = false;
    for (int i = 0; i < ncand; ++i) {
        double t = cands[i];
        if (!(t >= 0.0) || !std::isfinite(t)) continue;
        // Newton polish guards against cancellation in the closed form.
        for (int it = 0; it < 3; ++it) {
            const double slope = prof.mu_prime(t) - z * prof.sigma_u_prime(t);
            if (!(std::abs(slope) > 0.0)) break;
            const double step = (prof.h(t) - z) * prof.sigma_u(t) / slope;
            const double tn = t - step;
            if (tn >= 0.0 && std::isfinite(tn)) t = tn;
        }
        const double slope = prof.mu_prime(t) - z * prof.sigma_u_prime(t);
        const double hmis = std::abs(prof.h(t) - z);
        if (slope > 0.0 && hmis < 1e-7 * (1.0 + std::abs(z)) && t < best) {
            best = t;
            found = true;
        }
    }
    if (!found)
        throw DegenerateError("quantile: no ascending solution of h(t) = z found");
    res.t = best;
    res.c0 = 1.0 / (prof.mu_prime(best) - z * prof.sigma_u_prime(best));
    return res;
}

QuantileResult solve_monotone_quantile(const UseConditionProfile& prof, double z) {
    // Bracket [0, T] with doubling until h(T) >= z.
    const double t_scale = std::max(1.0, prof.time_basis.upper()(0));
    double T = t_scale;
    int doublings = 0;
    while (prof.h(T) < z) {
        T *= 2.0;
        if (++doublings > 60) {
            QuantileResult res;
            res.status = QuantileStatus::Infinite;
            res.t = kInf;
            return res;
        }
    }
    // Strict monotonicity of h over the bracket; violations are surfaced.
    const int ncheck = 256;
    double prev = prof.h(0.0);
    for (int i = 1; i <= ncheck; ++i) {
        const double hv = prof.h(T * i / ncheck);
        if (hv < prev - 1e-12 * (1.0 + std::abs(prev)))
            throw DomainError("quantile: h is not monotone on the bracket [0," +
                              std::to_string(T) + "]");
        prev = hv;
    }
    double lo = 0.0, hi = T;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (prof.h(mid) < z ? lo : hi) = mid;
    }
    QuantileResult res;
    res.t = 0.5 * (lo + hi);
    res.c0 = 1.0 / (prof.mu_prime(res.t) - z * prof.sigma_u_prime(res.t));
    return res;
}

}  // namespace

QuantileResult quantile(const UseConditionProfile& profile, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("quantile: alpha must lie in (0,1)");
    const double z = normal_quantile(alpha);

    QuantileResult res;
    if (z <= profile.h(0.0)) {
        res.status = QuantileStatus::AtZero;
        res.t = 0.0;
        return res;
    }
    if (z >= profile.h_limit()) {
        res.status = QuantileStatus::Infinite;
        res.t = kInf;
        return res;
    }

    res = (profile.time_basis.kind() == Basis::Kind::SimpleLinear)
              ? solve_linear_quantile(profile, z)
              : solve_monotone_quantile(profile, z);
    if (res.status != QuantileStatus::Ok) return res;
    res.grad_beta = linalg::kron(profile.f1_xu, profile.time_basis.eval1(res.t));
    return res;
}

QuantileResult quantile(const UseConditionProfile& profile, double alpha,
                        const VcParametrization& param) {
    QuantileResult res = quantile(profile, alpha);
    if (res.ok()) res.grad_varsigma = gradient_varsigma(profile, alpha, param);
    return res;
}

VectorXd gradient_varsigma(const UseConditionProfile& profile, double alpha,
                           const VcParametrization& param) {
    QuantileResult base = quantile(profile, alpha);
    if (!base.ok())
        throw DegenerateError("gradient_varsigma: quantile is degenerate");
    const double z = normal_quantile(alpha);
    const double t = base.t;
    VectorXd f2 = profile.time_basis.eval1(t);
    const double su = profile.sigma_u(t);

    const int q = param.size();
    VectorXd grad(q);
    if (param.d_sigma_gamma) {
        for (int a = 0; a < q; ++a) {
            MatrixXd dG = param.d_sigma_gamma(param.value, a);
            grad(a) = -z * f2.dot(dG * f2) / (2.0 * su);
        }
        return grad;
    }
    // Central differences of sigma_u through the rebuilt components.
    for (int a = 0; a < q; ++a) {
        const double h = std::max(1e-5 * std::abs(param.value(a)), 1e-8);
        VectorXd up = param.value, dn = param.value;
        up(a) += h;
        dn(a) -= h;
        const double su_up = std::sqrt(f2.dot(param.rebuild(up).sigma_gamma * f2));
        const double su_dn = std::sqrt(f2.dot(param.rebuild(dn).sigma_gamma * f2));
        grad(a) = -z * (su_up - su_dn) / (2.0 * h);
    }
    return grad;
}

AvarBreakdown avar_quantile_detail(const Scenario& scenario, const ApproximateDesign& xi,
                                   std::span<const double> time_plan, double alpha) {
    UseConditionProfile prof = use_profile(scenario);
    QuantileResult qr = quantile(prof, alpha);
    if (!qr.ok())
        throw DegenerateError("avar_quantile: quantile is degenerate at alpha=" +
                              std::to_string(alpha));

    MatrixXd F2 = build_time_matrix(time_plan, scenario.model.time_basis());
    MatrixXd V = response_covariance(F2, scenario.varcomps);
    MatrixXd M2 = F2.transpose() * linalg::spd_solve(V, F2, "avar_quantile: V");
    MatrixXd M1 = stress_info(xi, scenario.model);

    AvarBreakdown out;
    out.c0 = qr.c0;
    out.t_alpha = qr.t;

    // Kronecker factorization: c_b' (M1 (x) M2)^-1 c_b splits into marginals.
    CValue a1 = c_criterion_info(M1, prof.f1_xu);
    CValue a2 = c_criterion_info(M2, prof.time_basis.eval1(qr.t));
    out.feasible = a1.feasible && a2.feasible;
    out.beta_term = qr.c0 * qr.c0 * a1.value * a2.value;

    out.varsigma_term = 0.0;
    const double z = normal_quantile(alpha);
    if (z != 0.0) {
        VcParametrization param = default_vc_parametrization(scenario.varcomps);
        VectorXd cs = gradient_varsigma(prof, alpha, param);
        if (cs.cwiseAbs().maxCoeff() > 0.0) {
            MatrixXd Ms = info_varsigma(F2, param, 1);
            CValue av = c_criterion_info(Ms, cs);
            out.feasible = out.feasible && av.feasible;
            out.varsigma_term = qr.c0 * qr.c0 * av.value;
        }
    }
    out.total = out.beta_term + out.varsigma_term;
    return out;
}

double avar_quantile(const Scenario& scenario, const ApproximateDesign& xi,
                     std::span<const double> time_plan, double alpha) {
    return avar_quantile_detail(scenario, xi, time_plan, alpha).total;
}

double efficiency_avar(const Scenario& scenario, const ApproximateDesign& candidate,
                       const ApproximateDesign& reference,
                       std::span<const double> time_plan, double alpha) {
    const double va = avar_quantile(scenario, candidate, time_plan, alpha);
    const double vr = avar_quantile(scenario, reference, time_plan, alpha);
    return vr / va;
}

}  // namespace adt
