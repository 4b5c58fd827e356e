#include "adt/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adt/errors.hpp"
#include "adt/failure_time.hpp"
#include "adt/linalg.hpp"

namespace adt {

NormalSampler::NormalSampler(std::uint64_t base_seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                      static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
}

double NormalSampler::next() {
    // Box-Muller on explicitly constructed uniforms; u1 is kept away from 0.
    const double u1 = ((eng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = (eng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

long ExactDesign::n_units() const {
    return std::accumulate(counts.begin(), counts.end(), 0L);
}

std::vector<VectorXd> ExactDesign::expand() const {
    std::vector<VectorXd> out;
    out.reserve(n_units());
    for (size_t i = 0; i < settings.size(); ++i)
        for (long r = 0; r < counts[i]; ++r) out.push_back(settings[i]);
    return out;
}

ExactDesign make_exact(const ApproximateDesign& xi, long n_units,
                       std::vector<double> time_plan) {
    ExactDesign d;
    d.settings = xi.support;
    d.counts = round_to_exact(xi, n_units);
    d.time_plan = std::move(time_plan);
    return d;
}

MatrixXd simulate_one(const SimulationSpec& spec, long rep) {
    const Scenario& sc = spec.scenario;
    const ProductModel& model = sc.model;
    const int k = static_cast<int>(spec.design.time_plan.size());
    const int p2 = model.p2();
    const long n = spec.design.n_units();

    MatrixXd F2 = build_time_matrix(spec.design.time_plan, model.time_basis());
    MatrixXd Lg = linalg::psd_sqrt(sc.varcomps.sigma_gamma);
    MatrixXd Le = linalg::psd_sqrt(sc.varcomps.sigma_eps.materialize(k));
    MatrixXd B = Eigen::Map<const MatrixXd>(sc.beta.data(), p2, model.p1());

    NormalSampler rng(spec.base_seed, static_cast<std::uint64_t>(rep));
    auto units = spec.design.expand();

    MatrixXd y(n, k);
    VectorXd zg(p2), ze(k);
    for (long i = 0; i < n; ++i) {
        for (int s = 0; s < p2; ++s) zg(s) = rng.next();
        for (int j = 0; j < k; ++j) ze(j) = rng.next();
        VectorXd mean = F2 * (B * model.f1(units[i]));
        y.row(i) = (mean + F2 * (Lg * zg) + Le * ze).transpose();
    }
    return y;
}

std::vector<MatrixXd> simulate_paths(const SimulationSpec& spec) {
    if (spec.replications < 1)
        throw DomainError("simulate_paths: replications must be at least 1");
    std::vector<MatrixXd> out;
    out.reserve(spec.replications);
    for (long r = 0; r < spec.replications; ++r) out.push_back(simulate_one(spec, r));
    return out;
}

namespace {

// Sufficient statistics that make each profile-likelihood evaluation O(k^3)
// independent of n: Sy = sum_i y_i y_i', C = sum_i y_i f1(x_i)', A = F1'F1.
struct ProfileData {
    MatrixXd F2, Sy, C, A, Ainv;
    long n = 0;
    int k = 0, p1 = 0, p2 = 0;
};

ProfileData profile_data(const MatrixXd& y, const ProductModel& model,
                         const ExactDesign& design) {
    ProfileData d;
    d.n = y.rows();
    d.k = static_cast<int>(y.cols());
    d.p1 = model.p1();
    d.p2 = model.p2();
    d.F2 = build_time_matrix(design.time_plan, model.time_basis());
    auto units = design.expand();
    if (static_cast<long>(units.size()) != d.n)
        throw DomainError("fit_ml: design does not match the number of observation rows");
    d.Sy = MatrixXd::Zero(d.k, d.k);
    d.C = MatrixXd::Zero(d.k, d.p1);
    d.A = MatrixXd::Zero(d.p1, d.p1);
    for (long i = 0; i < d.n; ++i) {
        VectorXd yi = y.row(i).transpose();
        VectorXd a = model.f1(units[i]);
        d.Sy.noalias() += yi * yi.transpose();
        d.C.noalias() += yi * a.transpose();
        d.A.noalias() += a * a.transpose();
    }
    if (linalg::symmetric_rank(d.A, 1e-12) < d.p1)
        throw SingularError("fit_ml: stress design is rank deficient for the full model");
    d.Ainv = linalg::spd_inverse(d.A, "fit_ml: F1'F1");
    return d;
}

struct ProfileEval {
    double loglik = 0.0;
    MatrixXd Bhat;  // p2 x p1
};

ProfileEval profile_loglik(const ProfileData& d, const MatrixXd& V) {
    ProfileEval out;
    const double logdetV = linalg::spd_logdet(V, "fit_ml: V");
    MatrixXd Vinv = linalg::spd_inverse(V, "fit_ml: V");
    MatrixXd VinvF2 = Vinv * d.F2;
    MatrixXd G2 = d.F2.transpose() * VinvF2;
    out.Bhat = linalg::spd_solve(G2, VinvF2.transpose() * d.C, "fit_ml: M2") * d.Ainv;

    // Residual quadratic form via the statistics:
    // sum_i r_i' V^-1 r_i = tr(V^-1 Sy) - 2 tr(B' F2'V^-1 C) + tr(B' G2 B A).
    const double q = (Vinv * d.Sy).trace() -
                     2.0 * (out.Bhat.transpose() * VinvF2.transpose() * d.C).trace() +
                     (out.Bhat.transpose() * G2 * out.Bhat * d.A).trace();
    const double nk = static_cast<double>(d.n) * d.k;
    out.loglik = -0.5 * nk * std::log(2.0 * M_PI) - 0.5 * d.n * logdetV - 0.5 * q;
    return out;
}

// Transform bounded variance coordinates to an unconstrained space:
// standard deviations by log, correlations by atanh.
VectorXd to_unconstrained(const VcParametrization& p, const VectorXd& v) {
    VectorXd u = v;
    for (int a = 0; a < p.size(); ++a) {
        if (p.names[a] == "rho")
            u(a) = std::atanh(std::clamp(v(a), -0.999999, 0.999999));
        else
            u(a) = std::log(std::max(v(a), 1e-12));
    }
    return u;
}

VectorXd from_unconstrained(const VcParametrization& p, const VectorXd& u) {
    VectorXd v = u;
    for (int a = 0; a < p.size(); ++a) {
        if (p.names[a] == "rho")
            v(a) = std::tanh(u(a));
        else
            v(a) = std::exp(std::clamp(u(a), -40.0, 40.0));
    }
    return v;
}

}  // namespace

FitResult fit_ml(const MatrixXd& y, const ProductModel& model,
                 const ExactDesign& design, const VcParametrization& init,
                 const FitOptions& opts) {
    const int k = static_cast<int>(y.cols());
    if (k < model.p2() + 1)
        throw DomainError("fit_ml: needs k >= p2 + 1 time points for identifiability");
    ProfileData data = profile_data(y, model, design);

    long evals = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    VectorXd best_u;

    auto objective = [&](const VectorXd& u) {
        ++evals;
        VectorXd v = from_unconstrained(init, u);
        double ll;
        try {
            MatrixXd V = response_covariance(data.F2, init.rebuild(v));
            ll = profile_loglik(data, V).loglik;
        } catch (const Error&) {
            return 1e100;  // infeasible variance iterate
        }
        if (ll > best_ll) {
            best_ll = ll;
            best_u = u;
        }
        return -ll;
    };

    // Nelder-Mead over the unconstrained coordinates.
    const int dim = init.size();
    VectorXd u0 = to_unconstrained(init, init.value);
    std::vector<VectorXd> simplex(dim + 1, u0);
    std::vector<double> fval(dim + 1);
    for (int a = 0; a < dim; ++a) simplex[a + 1](a) += 0.25;
    for (int i = 0; i <= dim; ++i) fval[i] = objective(simplex[i]);

    while (evals < opts.budget) {
        std::vector<int> order(dim + 1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fval[a] < fval[b]; });
        std::vector<VectorXd> sx(dim + 1);
        std::vector<double> fx(dim + 1);
        for (int i = 0; i <= dim; ++i) {
            sx[i] = simplex[order[i]];
            fx[i] = fval[order[i]];
        }
        simplex = sx;
        fval = fx;
        if (std::abs(fval[dim] - fval[0]) <
            opts.tol * (std::abs(fval[0]) + opts.tol))
            break;

        VectorXd centroid = VectorXd::Zero(dim);
        for (int i = 0; i < dim; ++i) centroid += simplex[i];
        centroid /= dim;

        VectorXd xr = centroid + (centroid - simplex[dim]);
        double fr = objective(xr);
        if (fr < fval[0]) {
            VectorXd xe = centroid + 2.0 * (centroid - simplex[dim]);
            double fe = objective(xe);
            if (fe < fr) { simplex[dim] = xe; fval[dim] = fe; }
            else { simplex[dim] = xr; fval[dim] = fr; }
        } else if (fr < fval[dim - 1]) {
            simplex[dim] = xr;
            fval[dim] = fr;
        } else {
            VectorXd xc = centroid + 0.5 * (simplex[dim] - centroid);
            double fc = objective(xc);
            if (fc < fval[dim]) { simplex[dim] = xc; fval[dim] = fc; }
            else {
                for (int i = 1; i <= dim; ++i) {
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                    fval[i] = objective(simplex[i]);
                }
            }
        }
    }

    FitResult res;
    res.evaluations = evals;
    res.varsigma = from_unconstrained(init, best_u);
    res.varcomps = init.rebuild(res.varsigma);
    MatrixXd V = response_covariance(data.F2, res.varcomps);
    ProfileEval pe = profile_loglik(data, V);
    res.beta = Eigen::Map<VectorXd>(pe.Bhat.data(), pe.Bhat.size());
    res.loglik = pe.loglik;
    {
        MatrixXd V0 = response_covariance(data.F2, init.rebuild(init.value));
        res.loglik_init = profile_loglik(data, V0).loglik;
    }
    res.converged = res.loglik >= res.loglik_init - 1e-9;
    return res;
}

ValidationReport validate_avar(const SimulationSpec& spec, double alpha) {
    const Scenario& sc = spec.scenario;
    const long reps = spec.replications;
    if (reps < 1) throw DomainError("validate_avar: replications must be at least 1");

    UseConditionProfile prof_true = use_profile(sc);
    QuantileResult q_true = quantile(prof_true, alpha);
    if (!q_true.ok())
        throw DegenerateError("validate_avar: the target quantile is degenerate");

    // Predicted standardized variance at the realized exact frequencies.
    std::vector<VectorXd> pts = spec.design.settings;
    VectorXd w(static_cast<Eigen::Index>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i)
        w(static_cast<Eigen::Index>(i)) =
            static_cast<double>(spec.design.counts[i]) / spec.design.n_units();
    ApproximateDesign realized = ApproximateDesign::make(pts, w);
    const double avar = avar_quantile(sc, realized, spec.design.time_plan, alpha);

    VcParametrization init = default_vc_parametrization(sc.varcomps);

    ValidationReport rep;
    rep.n = spec.design.n_units();
    rep.reps = reps;
    rep.alpha = alpha;
    rep.seed = spec.base_seed;
    rep.t_alpha_true = q_true.t;
    rep.avar_standardized = avar;
    rep.t_hats.assign(reps, std::numeric_limits<double>::quiet_NaN());

    for (long r = 0; r < reps; ++r) {
        MatrixXd y = simulate_one(spec, r);
        FitResult fit = fit_ml(y, sc.model, spec.design, init);
        Scenario fitted = sc;
        fitted.beta = fit.beta;
        fitted.varcomps = fit.varcomps;
        UseConditionProfile prof = use_profile(fitted);
        QuantileResult qh = quantile(prof, alpha);
        if (qh.ok()) rep.t_hats[r] = qh.t;
    }

    // Compensated accumulation in replication order keeps the aggregate
    // independent of any execution interleaving.
    double sum = 0.0, comp = 0.0;
    long m = 0;
    for (double v : rep.t_hats) {
        if (std::isnan(v)) continue;
        ++m;
        double t = sum + (v - comp);
        comp = (t - sum) - (v - comp);
        sum = t;
    }
    rep.degenerate = reps - m;
    rep.degenerate_rate = static_cast<double>(rep.degenerate) / reps;
    rep.reliable = rep.degenerate_rate <= 0.01;
    if (m >= 1) rep.mean_t_hat = sum / m;
    if (m >= 2) {
        double ss = 0.0, comp2 = 0.0;
        for (double v : rep.t_hats) {
            if (std::isnan(v)) continue;
            const double d = (v - rep.mean_t_hat) * (v - rep.mean_t_hat);
            double t = ss + (d - comp2);
            comp2 = (t - ss) - (d - comp2);
            ss = t;
        }
        rep.empirical_var = ss / (m - 1);
        rep.n_times_empirical_var = rep.n * rep.empirical_var;
        rep.ratio = rep.n_times_empirical_var / avar;
        // Normal-approximation interval for a variance ratio.
        const double half = 2.0 * std::sqrt(2.0 / (m - 1));
        rep.ci_lo = rep.ratio * (1.0 - half);
        rep.ci_hi = rep.ratio * (1.0 + half);
    }
    return rep;
}

}  // namespace adt
