#include "adt/destructive.hpp"

#include <cmath>

#include "adt/errors.hpp"
#include "adt/failure_time.hpp"
#include "adt/linalg.hpp"
#include "adt/stress_design.hpp"

namespace adt {

double WeightedTimeModel::variance(double t) const {
    VectorXd f2 = time_basis.eval1(t);
    return f2.dot(sigma_gamma * f2) + sigma_eps2;
}

double WeightedTimeModel::sigma(double t) const { return std::sqrt(variance(t)); }

VectorXd WeightedTimeModel::weighted_basis(double t) const {
    return time_basis.eval1(t) / sigma(t);
}

WeightedTimeModel weighted_time_model(const Scenario& scenario) {
    if (!scenario.varcomps.sigma_eps.is_scalar())
        throw DomainError("weighted_time_model: single measurements need a scalar error variance");
    WeightedTimeModel wm{scenario.model.time_basis(), scenario.varcomps.sigma_gamma,
                         scenario.varcomps.sigma_eps.variance()};
    if (!(wm.variance(scenario.model.time_basis().lower()(0)) > 0.0))
        throw DegenerateError("weighted_time_model: zero variance at the start of the region");
    return wm;
}

double sigma_ratio(const VarianceComponents& vc, const Basis& time_basis) {
    WeightedTimeModel wm{time_basis, vc.sigma_gamma,
                         vc.sigma_eps.is_scalar() ? vc.sigma_eps.variance()
                                                  : vc.sigma_eps.materialize(1)(0, 0)};
    const double lo = time_basis.lower()(0), hi = time_basis.upper()(0);
    const double s0 = wm.variance(lo);
    if (!(s0 > 0.0)) throw DegenerateError("sigma_ratio: sigma(0) is zero");
    return std::sqrt(wm.variance(hi) / s0);
}

double pi_star(double t_half, double sigma0, double sigma1) {
    if (!(sigma0 > 0.0 && sigma1 > 0.0))
        throw DegenerateError("pi_star: standard deviations must be positive");
    if (!(t_half > 1.0))
        throw DomainError("pi_star: t_half <= 1 is the interpolation case; "
                          "use elfving_solve on the weighted basis");
    return t_half * sigma1 / (t_half * sigma1 + (t_half - 1.0) * sigma0);
}

namespace {

ApproximateDesign weighted_time_optimum(const WeightedTimeModel& wm, double t_half,
                                        double* pi_out, int grid_points) {
    const double lo = wm.time_basis.lower()(0), hi = wm.time_basis.upper()(0);
    if (t_half > hi && wm.time_basis.kind() == Basis::Kind::SimpleLinear) {
        const double pi = pi_star(t_half, wm.sigma(lo), wm.sigma(hi));
        if (pi_out) *pi_out = pi;
        return ApproximateDesign::make1d({lo, hi}, {1.0 - pi, pi});
    }
    // Interpolation or non-linear bases: Elfving on the weighted basis.
    auto grid = make_grid(VectorXd::Constant(1, lo), VectorXd::Constant(1, hi),
                          grid_points);
    auto sol = elfving_solve(
        [&](const VectorXd& x) { return wm.weighted_basis(x(0)); }, grid,
        wm.time_basis.eval1(t_half));
    if (pi_out) {
        *pi_out = 0.0;
        for (int i = 0; i < sol.design.size(); ++i)
            if (std::abs(sol.design.support[i](0) - hi) < 1e-12)
                *pi_out = sol.design.weights(i);
    }
    return sol.design;
}

}  // namespace

DestructiveResult destructive_optimal_design(const Scenario& scenario,
                                             int grid_per_axis) {
    UseConditionProfile prof = use_profile(scenario);
    QuantileResult med = quantile(prof, 0.5);
    if (!med.ok())
        throw DegenerateError("destructive_optimal_design: median failure time is degenerate");

    DesignReport stress_rep = optimal_stress_for_quantile(scenario, grid_per_axis);
    WeightedTimeModel wm = weighted_time_model(scenario);

    DestructiveResult out;
    out.xi_marginal = stress_rep.design;
    out.tau_marginal = weighted_time_optimum(wm, med.t, &out.pi, 1001);
    out.zeta = product_design(out.xi_marginal, out.tau_marginal);

    const ProductModel& model = scenario.model;
    const int d = model.stress_arity();
    auto feval = [&](const VectorXd& xt) {
        return linalg::kron(model.f1(xt.head(d)), wm.weighted_basis(xt(d)));
    };
    const VectorXd c = linalg::kron(prof.f1_xu, model.time_basis().eval1(med.t));

    // Combined certificate grid: stress box x time interval.
    const int sg = d > 2 ? 21 : std::min(grid_per_axis, 101);
    auto xs = stress_grid(model, sg);
    const int tg = 101;
    std::vector<VectorXd> grid;
    grid.reserve(xs.size() * tg);
    const double lo = wm.time_basis.lower()(0), hi = wm.time_basis.upper()(0);
    for (const auto& x : xs) {
        for (int j = 0; j < tg; ++j) {
            VectorXd xt(d + 1);
            xt.head(d) = x;
            xt(d) = lo + (hi - lo) * j / (tg - 1.0);
            grid.push_back(xt);
        }
    }

    DesignReport rep;
    rep.design = out.zeta;
    rep.family = "destructive";
    rep.criterion = c_criterion_info(design_info(out.zeta, feval), c).value;
    rep.optimum_criterion = rep.criterion;
    rep.efficiency = 1.0;
    rep.certificate_gap = verify_c_optimality(out.zeta, feval, grid, c);
    rep.full_model_estimable =
        linalg::symmetric_rank(design_info(out.zeta, feval)) == model.p();
    rep.notes = "product of the stress-marginal and weighted-time-marginal optima";
    out.report = rep;
    return out;
}

namespace {

// Efficiency of a two-point-or-grid time marginal tau against the locally
// optimal plan when the variance path is sigma(.) and the target is t_half.
double marginal_time_eff(const ApproximateDesign& tau, const WeightedTimeModel& wm,
                         double t_half) {
    const VectorXd c = wm.time_basis.eval1(t_half);
    auto feval = [&](const VectorXd& x) { return wm.weighted_basis(x(0)); };
    CValue cand = c_criterion_info(design_info(tau, feval), c);
    if (!cand.feasible) return 0.0;
    ApproximateDesign opt = weighted_time_optimum(wm, t_half, nullptr, 1001);
    CValue best = c_criterion_info(design_info(opt, feval), c);
    return best.value / cand.value;
}

}  // namespace

std::vector<SensitivityCurve> sensitivity_curves(const Scenario& scenario,
                                                 const SensitivityOptions& opts) {
    UseConditionProfile prof = use_profile(scenario);
    QuantileResult med = quantile(prof, 0.5);
    if (!med.ok())
        throw DegenerateError("sensitivity_curves: median failure time is degenerate");
    WeightedTimeModel nominal = weighted_time_model(scenario);
    const double lo = nominal.time_basis.lower()(0), hi = nominal.time_basis.upper()(0);

    // Nominal-optimal time marginal, held fixed while the truth varies.
    ApproximateDesign tau_nominal = weighted_time_optimum(nominal, med.t, nullptr, 1001);
    ApproximateDesign tau_u2 = ApproximateDesign::make1d({lo, hi}, {0.5, 0.5});
    std::vector<double> t6(6), w6(6, 1.0 / 6.0);
    for (int i = 0; i < 6; ++i) t6[i] = lo + (hi - lo) * i / 5.0;
    ApproximateDesign tau_u6 = ApproximateDesign::make1d(t6, w6);

    const int np = opts.points > 1 ? opts.points : 50;
    double th_lo = opts.t_half_lo > 0.0 ? opts.t_half_lo : 1.02;
    double th_hi = opts.t_half_hi > 0.0 ? opts.t_half_hi : std::max(20.0, 4.0 * med.t);
    double ra_lo = opts.ratio_lo > 0.0 ? opts.ratio_lo : 0.2;
    double ra_hi = opts.ratio_hi > 0.0 ? opts.ratio_hi : 5.0;

    auto log_space = [np](double a, double b, int i) {
        return a * std::pow(b / a, static_cast<double>(i) / (np - 1));
    };

    std::vector<SensitivityCurve> out(2);
    out[0].axis = "t_half";
    for (int i = 0; i < np; ++i) {
        const double t = log_space(th_lo, th_hi, i);
        out[0].rows.push_back({t, marginal_time_eff(tau_nominal, nominal, t),
                               marginal_time_eff(tau_u2, nominal, t),
                               marginal_time_eff(tau_u6, nominal, t)});
    }

    // Ratio probes follow the path that pins sigma2^2 = sigma1^2 + sigma_eps^2
    // and moves the correlation; unreachable ratios clamp the correlation.
    out[1].axis = "sigma_ratio";
    const double s1sq = scenario.varcomps.sigma_gamma(0, 0);
    const double se2 = nominal.sigma_eps2;
    const double s2sq = s1sq + se2;
    const double s1 = std::sqrt(s1sq), s2 = std::sqrt(s2sq);
    for (int i = 0; i < np; ++i) {
        const double r = log_space(ra_lo, ra_hi, i);
        double rho = (r * r - 2.0) * (s1sq + se2) / (2.0 * s1 * s2);
        rho = std::clamp(rho, -0.999, 0.999);
        WeightedTimeModel probe = nominal;
        probe.sigma_gamma.resize(2, 2);
        probe.sigma_gamma << s1sq, rho * s1 * s2, rho * s1 * s2, s2sq;
        out[1].rows.push_back({r, marginal_time_eff(tau_nominal, probe, med.t),
                               marginal_time_eff(tau_u2, probe, med.t),
                               marginal_time_eff(tau_u6, probe, med.t)});
    }
    return out;
}

}  // namespace adt
