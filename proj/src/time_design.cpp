#include "adt/time_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adt/errors.hpp"
#include "adt/failure_time.hpp"
#include "adt/linalg.hpp"

namespace adt {

TimeGrid TimeGrid::make(double delta, int k) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw DomainError("TimeGrid: delta must lie in (0,1]");
    if (k < 1) throw DomainError("TimeGrid: k must be at least 1");
    TimeGrid g;
    g.delta = delta;
    g.k = k;
    g.J = static_cast<int>(std::lround(1.0 / delta));
    if (std::abs(g.J * delta - 1.0) > 1e-12)
        throw DomainError("TimeGrid: 1/delta must be an integer (J*delta = 1 within 1e-12)");
    g.points.resize(g.J + 1);
    for (int j = 0; j <= g.J; ++j) g.points[j] = std::min(j * delta, 1.0);
    if (g.cap() * (g.J + 1) < 1.0 - 1e-12)
        throw DomainError("TimeGrid: infeasible cap; fewer than k grid points");
    return g;
}

namespace {

// Clip weights to the cap and spread the excess proportionally over the
// unclipped points; repeats until no point exceeds the cap.
void project_to_cap(Eigen::VectorXd& w, double cap) {
    const int n = static_cast<int>(w.size());
    std::vector<char> capped(n, 0);
    for (int round = 0; round <= n; ++round) {
        double fixed = 0.0;
        double free_sum = 0.0;
        bool overflow = false;
        for (int j = 0; j < n; ++j) {
            if (capped[j]) fixed += cap;
            else free_sum += w(j);
        }
        const double target = 1.0 - fixed;
        if (free_sum <= 0.0) break;
        const double scale = target / free_sum;
        for (int j = 0; j < n; ++j) {
            if (capped[j]) { w(j) = cap; continue; }
            w(j) *= scale;
            if (w(j) > cap + 1e-15) {
                capped[j] = 1;
                w(j) = cap;
                overflow = true;
            }
        }
        if (!overflow) break;
    }
}

struct GapInfo {
    double gap = 0.0;
    double criterion = 0.0;
};

// Constrained equivalence certificate: with d_j the squared sensitivities,
// optimality requires max over unclipped points of d <= min over supported
// points of d.
GapInfo constrained_gap(const Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& feats,
                        const VectorXd& c, double cap) {
    const int n = static_cast<int>(w.size());
    const int p = static_cast<int>(c.size());
    MatrixXd M = MatrixXd::Zero(p, p);
    for (int j = 0; j < n; ++j)
        if (w(j) > 0.0) M.noalias() += w(j) * feats[j] * feats[j].transpose();
    VectorXd Mc = linalg::spd_solve(M, c, "time plan criterion");
    GapInfo out;
    out.criterion = c.dot(Mc);
    double max_unclipped = 0.0;
    double min_supported = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double g = feats[j].dot(Mc);
        const double d = g * g;
        if (w(j) < cap - 1e-10) max_unclipped = std::max(max_unclipped, d);
        if (w(j) > 1e-10) min_supported = std::min(min_supported, d);
    }
    out.gap = std::max(0.0, max_unclipped / min_supported - 1.0);
    return out;
}

double criterion_of(const Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& feats,
                    const VectorXd& c) {
    const int p = static_cast<int>(c.size());
    MatrixXd M = MatrixXd::Zero(p, p);
    for (int j = 0; j < static_cast<int>(w.size()); ++j)
        if (w(j) > 0.0) M.noalias() += w(j) * feats[j] * feats[j].transpose();
    VectorXd Mc = linalg::spd_solve(M, c, "time plan criterion");
    return c.dot(Mc);
}

}  // namespace

TimePlanResult optimal_time_plan(const Scenario& scenario, const TimeGrid& grid,
                                 const TimePlanOptions& opts) {
    const Basis& f2 = scenario.model.time_basis();
    const int p2 = f2.dimension();
    if (grid.k < p2)
        throw DomainError("optimal_time_plan: k must be at least p2");

    UseConditionProfile prof = use_profile(scenario);
    QuantileResult med = quantile(prof, 0.5);
    if (!med.ok())
        throw DegenerateError("optimal_time_plan: median failure time is degenerate");
    const VectorXd c = f2.eval1(med.t);

    const double cap = opts.cap_override > 0.0 ? opts.cap_override : grid.cap();
    const int n = static_cast<int>(grid.points.size());
    if (cap * n < 1.0 - 1e-12)
        throw DomainError("optimal_time_plan: cap infeasible on this grid");

    std::vector<Eigen::VectorXd> feats(n);
    for (int j = 0; j < n; ++j) feats[j] = f2.eval1(grid.points[j]);

    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
    double crit = criterion_of(w, feats, c);
    if (opts.trace) opts.trace->push_back(crit);

    long iter = 0;
    double gap = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (iter < opts.max_iter) {
        ++iter;
        // Multiplicative reweighting by the square-root of the sensitivity
        // ratio; the half power is the monotone choice for c-type criteria
        // (the full power oscillates in a two-cycle around the optimum).
        const int p = static_cast<int>(c.size());
        MatrixXd M = MatrixXd::Zero(p, p);
        for (int j = 0; j < n; ++j)
            if (w(j) > 0.0) M.noalias() += w(j) * feats[j] * feats[j].transpose();
        VectorXd Mc = linalg::spd_solve(M, c, "time plan criterion");
        const double cur = c.dot(Mc);

        Eigen::VectorXd prop = w;
        double mass = 0.0;
        for (int j = 0; j < n; ++j) {
            const double g = feats[j].dot(Mc);
            prop(j) = w(j) * std::sqrt((g * g) / cur);
            mass += prop(j);
        }
        prop /= mass;
        project_to_cap(prop, cap);

        // Keep the criterion non-increasing; back off toward the current
        // iterate when clipping spoils the multiplicative descent step.
        double next = criterion_of(prop, feats, c);
        double s = 1.0;
        while (next > cur * (1.0 + 1e-15) && s > 1e-8) {
            s *= 0.5;
            Eigen::VectorXd blend = w + s * (prop - w);
            project_to_cap(blend, cap);
            prop = blend;
            next = criterion_of(prop, feats, c);
        }
        if (next > cur * (1.0 + 1e-15)) {
            GapInfo gi = constrained_gap(w, feats, c, cap);
            gap = gi.gap;
            crit = gi.criterion;
            converged = gap <= opts.tol;
            break;
        }
        w = prop;
        crit = next;
        if (opts.trace) opts.trace->push_back(crit);

        if (iter % 8 == 0 || iter == opts.max_iter) {
            GapInfo gi = constrained_gap(w, feats, c, cap);
            gap = gi.gap;
            if (gap <= opts.tol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) {
        GapInfo gi = constrained_gap(w, feats, c, cap);
        gap = gi.gap;
        converged = gap <= opts.tol;
    }

    // Snap weights that have effectively reached the cap or zero.
    for (int j = 0; j < n; ++j) {
        if (w(j) > cap - 1e-9) w(j) = cap;
        else if (w(j) < 1e-10) w(j) = 0.0;
    }
    const double mass = w.sum();
    w /= mass;

    std::vector<VectorXd> pts;
    std::vector<double> wts;
    for (int j = 0; j < n; ++j) {
        if (w(j) > 0.0) {
            pts.push_back(VectorXd::Constant(1, grid.points[j]));
            wts.push_back(w(j));
        }
    }
    VectorXd wv = Eigen::Map<const VectorXd>(wts.data(), wts.size());

    TimePlanResult out;
    out.tau = ApproximateDesign::make(std::move(pts), wv);
    out.profile.assign(w.data(), w.data() + n);
    out.t_half = med.t;
    out.report.design = out.tau;
    out.report.family = "time";
    out.report.criterion = crit;
    out.report.optimum_criterion = crit;
    out.report.efficiency = 1.0;
    out.report.certificate_gap = gap;
    out.report.converged = converged;
    out.report.iterations = iter;
    out.report.grid_points = grid.points;
    out.report.grid_profile = out.profile;
    out.report.notes = "criterion: extrapolation at the median in the fixed-effect "
                       "marginal time model; independent of sigma_gamma";
    if (!converged)
        out.report.notes += "; NOT CONVERGED, achieved gap " + std::to_string(gap);
    return out;
}

std::vector<double> adjust_to_exact_plan(const ApproximateDesign& tau,
                                         const TimeGrid& grid) {
    const double cap = grid.cap();
    std::vector<std::pair<double, double>> partial;  // (time, weight)
    std::vector<double> times;
    for (int i = 0; i < tau.size(); ++i) {
        const double t = tau.support[i](0);
        const double wgt = tau.weights(i);
        if (wgt > cap + 1e-10)
            throw DomainError("adjust_to_exact_plan: weight exceeds the 1/k cap");
        if (wgt >= cap - 1e-9) times.push_back(t);
        else partial.emplace_back(t, wgt);
    }
    if (static_cast<int>(times.size()) > grid.k)
        throw DomainError("adjust_to_exact_plan: more than k points at full cap");

    // Transfer mass from lighter partial points to heavier ones until the
    // plan holds exactly k points; ties resolve toward the earlier time.
    std::sort(partial.begin(), partial.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    int needed = grid.k - static_cast<int>(times.size());
    if (static_cast<int>(partial.size()) < needed)
        throw DomainError("adjust_to_exact_plan: too few support points to fill the plan");
    for (int i = 0; i < needed; ++i) times.push_back(partial[i].first);
    std::sort(times.begin(), times.end());
    return times;
}

double mixed_time_criterion(const ApproximateDesign& tau, const Scenario& scenario,
                            int k, const VectorXd& c) {
    const Basis& f2 = scenario.model.time_basis();
    if (!scenario.varcomps.sigma_eps.is_scalar())
        throw DomainError("mixed_time_criterion: weighted plans need scalar errors");
    const double se2 = scenario.varcomps.sigma_eps.variance();
    MatrixXd M0 = MatrixXd::Zero(f2.dimension(), f2.dimension());
    for (int i = 0; i < tau.size(); ++i) {
        VectorXd fi = f2.eval1(tau.support[i](0));
        M0.noalias() += tau.weights(i) * fi * fi.transpose();
    }
    // M2^-1 = (F2' Sigma_eps^-1 F2)^-1 + Sigma_gamma with F2'Se^-1F2 = (k/se2) M0.
    MatrixXd M2inv = (se2 / k) * linalg::spd_inverse(M0, "mixed_time_criterion: M0") +
                     scenario.varcomps.sigma_gamma;
    return c.dot(M2inv * c);
}

double time_plan_efficiency(const ApproximateDesign& tau0,
                            const ApproximateDesign& tau_star,
                            const Scenario& scenario, int k) {
    UseConditionProfile prof = use_profile(scenario);
    QuantileResult med = quantile(prof, 0.5);
    if (!med.ok())
        throw DegenerateError("time_plan_efficiency: median failure time is degenerate");
    const VectorXd c = scenario.model.time_basis().eval1(med.t);
    return mixed_time_criterion(tau_star, scenario, k, c) /
           mixed_time_criterion(tau0, scenario, k, c);
}

}  // namespace adt
