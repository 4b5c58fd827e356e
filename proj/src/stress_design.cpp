#include "adt/stress_design.hpp"

#include <cmath>
#include <string>

#include "adt/errors.hpp"
#include "adt/failure_time.hpp"
#include "adt/linalg.hpp"
#include "simplex.hpp"

namespace adt {

ApproximateDesign extrapolation_two_point(double xu) {
    if (xu > 0.0)
        throw DomainError("extrapolation_two_point: requires x_u <= 0");
    const double w = std::abs(xu) / (1.0 + 2.0 * std::abs(xu));
    if (w == 0.0) return ApproximateDesign::make1d({0.0}, {1.0});
    return ApproximateDesign::make1d({0.0, 1.0}, {1.0 - w, w});
}

ApproximateDesign extrapolation_two_point_above(double target) {
    if (target < 1.0)
        throw DomainError("extrapolation_two_point_above: requires target >= 1");
    const double w = target / (2.0 * target - 1.0);
    if (w >= 1.0) return ApproximateDesign::make1d({1.0}, {1.0});
    return ApproximateDesign::make1d({0.0, 1.0}, {1.0 - w, w});
}

ElfvingSolution elfving_solve(const FeatureMap& f, const std::vector<VectorXd>& grid,
                              const VectorXd& c) {
    if (grid.empty()) throw DomainError("elfving_solve: empty candidate grid");
    if (c.cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("elfving_solve: c must be non-zero");

    const int p = static_cast<int>(c.size());
    const int N = static_cast<int>(grid.size());

    // Variables: u_i^+ and u_i^- per grid point, then lambda.
    // Rows: sum_i (u_i^+ - u_i^-) f(x_i) - lambda c = 0, and total weight 1.
    MatrixXd A(p + 1, 2 * N + 1);
    for (int i = 0; i < N; ++i) {
        VectorXd fi = f(grid[i]);
        if (fi.size() != p)
            throw DomainError("elfving_solve: feature dimension does not match c");
        A.col(2 * i).head(p) = fi;
        A.col(2 * i + 1).head(p) = -fi;
        A(p, 2 * i) = 1.0;
        A(p, 2 * i + 1) = 1.0;
    }
    A.col(2 * N).head(p) = -c;
    A(p, 2 * N) = 0.0;

    VectorXd b = VectorXd::Zero(p + 1);
    b(p) = 1.0;
    VectorXd obj = VectorXd::Zero(2 * N + 1);
    obj(2 * N) = -1.0;  // maximize lambda

    detail::LpResult lp = detail::solve_lp(A, b, obj);
    if (!lp.feasible)
        throw DomainError("elfving_solve: LP infeasible");
    if (!lp.bounded)
        throw SingularError("elfving_solve: LP unbounded; degenerate candidate set");

    const double lambda = lp.x(2 * N);
    if (lambda <= 1e-10)
        throw DomainError("elfving_solve: c lies outside the span of the candidate vectors");

    // When lambda*c coincides with a candidate vector, the one-point design
    // is the canonical representation of the boundary point.
    for (int i = 0; i < N; ++i) {
        VectorXd fi = f(grid[i]);
        for (int sign : {+1, -1}) {
            if ((sign * fi - lambda * c).norm() <= 1e-9 * std::max(1.0, c.norm())) {
                ElfvingSolution sol;
                sol.lambda = lambda;
                sol.design = ApproximateDesign::make({grid[i]}, VectorXd::Ones(1));
                sol.signs = {sign};
                sol.criterion = 1.0 / (lambda * lambda);
                return sol;
            }
        }
    }

    std::vector<VectorXd> pts;
    std::vector<double> w;
    std::vector<int> signs;
    for (int i = 0; i < N; ++i) {
        const double up = lp.x(2 * i), um = lp.x(2 * i + 1);
        if (up > 1e-10) {
            pts.push_back(grid[i]);
            w.push_back(up);
            signs.push_back(+1);
        }
        if (um > 1e-10) {
            pts.push_back(grid[i]);
            w.push_back(um);
            signs.push_back(-1);
        }
    }
    double wsum = 0.0;
    for (double v : w) wsum += v;
    VectorXd wv(static_cast<Eigen::Index>(w.size()));
    for (size_t i = 0; i < w.size(); ++i) wv(static_cast<Eigen::Index>(i)) = w[i] / wsum;

    ElfvingSolution sol;
    sol.lambda = lambda;
    sol.design = ApproximateDesign::make(std::move(pts), wv);
    sol.signs = std::move(signs);
    sol.criterion = 1.0 / (lambda * lambda);

    // Elfving identity: lambda c = sum w_i z_i f(x_i).
    VectorXd lhs = VectorXd::Zero(c.size());
    for (int i = 0; i < N; ++i) {
        const double up = lp.x(2 * i), um = lp.x(2 * i + 1);
        if (up > 1e-10) lhs += (up / wsum) * f(grid[i]);
        if (um > 1e-10) lhs -= (um / wsum) * f(grid[i]);
    }
    if ((lhs - lambda * c).norm() > 1e-8 * std::max(1.0, c.norm()))
        throw ConvergenceError("elfving_solve: representation residual exceeds 1e-8");
    return sol;
}

double verify_c_optimality(const ApproximateDesign& design, const FeatureMap& f,
                           const std::vector<VectorXd>& grid, const VectorXd& c) {
    MatrixXd M = design_info(design, f);
    CValue crit = c_criterion_info(M, c);
    if (!crit.feasible)
        throw DomainError("verify_c_optimality: design infeasible for c");
    if (linalg::symmetric_rank(M) == M.rows()) {
        VectorXd Mc = linalg::psd_pseudo_inverse(M) * c;
        double worst = 0.0;
        for (const auto& x : grid) {
            const double g = f(x).dot(Mc);
            worst = std::max(worst, g * g);
        }
        return worst / crit.value - 1.0;
    }
    // Singular information: the sensitivity bound would need a tuned
    // generalized inverse, so certify against the Elfving optimum instead.
    ElfvingSolution best = elfving_solve(f, grid, c);
    return crit.value / best.criterion - 1.0;
}

ApproximateDesign additive_family(double xu1, double xu2, double a) {
    if (!(a >= 0.0 && a <= 1.0))
        throw DomainError("additive_family: mixing coefficient must lie in [0,1]");
    if (!(xu1 < 0.0 && xu2 < 0.0))
        throw DomainError("additive_family: requires xu1, xu2 < 0");
    if (xu1 == xu2)
        throw DegenerateError(
            "additive_family: equal use conditions admit only a singular two-vertex "
            "optimum; use it as a benchmark only");

    const bool swapped = std::abs(xu1) < std::abs(xu2);
    const double u1 = std::max(std::abs(xu1), std::abs(xu2));
    const double u2 = std::min(std::abs(xu1), std::abs(xu2));
    const double lc = 1.0 / (1.0 + 2.0 * u1);

    auto vertex = [&](double v1, double v2) {
        VectorXd x(2);
        if (swapped) std::swap(v1, v2);
        x << v1, v2;
        return x;
    };

    std::vector<VectorXd> pts = {vertex(0, 0), vertex(0, 1), vertex(1, 0), vertex(1, 1)};
    VectorXd w(4);
    w << (1.0 + a * u1 + (1.0 - a) * u2) * lc,
         (1.0 - a) * (u1 - u2) * lc,
         a * (u1 - u2) * lc,
         ((1.0 - a) * u1 + a * u2) * lc;
    return ApproximateDesign::make(std::move(pts), w);
}

std::vector<VectorXd> make_grid(const VectorXd& lower, const VectorXd& upper,
                                int per_axis) {
    if (per_axis < 2) throw DomainError("make_grid: need at least 2 points per axis");
    const int d = static_cast<int>(lower.size());
    std::vector<VectorXd> out;
    long total = 1;
    for (int j = 0; j < d; ++j) total *= per_axis;
    out.reserve(total);
    std::vector<int> idx(d, 0);
    while (true) {
        VectorXd x(d);
        for (int j = 0; j < d; ++j)
            x(j) = lower(j) + (upper(j) - lower(j)) * idx[j] / (per_axis - 1.0);
        out.push_back(x);
        int j = d - 1;
        while (j >= 0 && ++idx[j] == per_axis) idx[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

std::vector<VectorXd> stress_grid(const ProductModel& model, int per_axis) {
    VectorXd lo(model.stress_arity()), hi(model.stress_arity());
    int off = 0;
    for (const Basis& b : model.stress_bases()) {
        lo.segment(off, b.arity()) = b.lower();
        hi.segment(off, b.arity()) = b.upper();
        off += b.arity();
    }
    return make_grid(lo, hi, per_axis);
}

ApproximateDesign vertex_uniform_design(const ProductModel& model) {
    VectorXd lo(model.stress_arity()), hi(model.stress_arity());
    int off = 0;
    for (const Basis& b : model.stress_bases()) {
        lo.segment(off, b.arity()) = b.lower();
        hi.segment(off, b.arity()) = b.upper();
        off += b.arity();
    }
    auto corners = make_grid(lo, hi, 2);
    VectorXd w = VectorXd::Constant(corners.size(), 1.0 / corners.size());
    return ApproximateDesign::make(std::move(corners), w);
}

namespace {

// Optimal design in one stress factor group for target vector position xu_g.
ApproximateDesign group_optimum(const Basis& basis, const VectorXd& xu_g,
                                int grid_per_axis) {
    const bool unit_box = basis.lower().isZero(1e-15) &&
                          (basis.upper().array() == 1.0).all();
    if (basis.kind() == Basis::Kind::SimpleLinear && unit_box && xu_g(0) <= 0.0)
        return extrapolation_two_point(xu_g(0));
    auto grid = make_grid(basis.lower(), basis.upper(), grid_per_axis);
    return elfving_solve([&](const VectorXd& x) { return basis.eval(x); }, grid,
                         basis.eval(xu_g))
        .design;
}

}  // namespace

DesignReport optimal_stress_for_quantile(const Scenario& scenario, int grid_per_axis,
                                         bool with_benchmarks) {
    UseConditionProfile prof = use_profile(scenario);
    QuantileResult qr = quantile(prof, scenario.alpha);
    if (!qr.ok())
        throw DegenerateError("optimal_stress_for_quantile: quantile is degenerate");

    const ProductModel& model = scenario.model;
    auto parts = model.split_stress(scenario.use_condition);

    ApproximateDesign xi = group_optimum(model.stress_bases()[0], parts[0], grid_per_axis);
    for (size_t g = 1; g < model.stress_bases().size(); ++g)
        xi = product_design(xi, group_optimum(model.stress_bases()[g], parts[g],
                                              grid_per_axis));

    const VectorXd c = prof.f1_xu;
    DesignReport rep;
    rep.design = xi;
    rep.family = "stress";
    rep.alpha_independent = true;
    rep.criterion = c_criterion(xi, model, c).value;
    rep.optimum_criterion = rep.criterion;
    rep.efficiency = 1.0;
    rep.full_model_estimable =
        linalg::symmetric_rank(stress_info(xi, model)) == model.p1();
    rep.certificate_gap = verify_c_optimality(
        xi, [&](const VectorXd& x) { return model.f1(x); },
        stress_grid(model, std::min(grid_per_axis, model.stress_arity() > 2 ? 21 : 101)),
        c);

    if (with_benchmarks) {
        ApproximateDesign vu = vertex_uniform_design(model);
        rep.benchmarks["uniform_vertices"] = efficiency(vu, xi, model, c).value;
        // Table-style grid benchmarks for a single simple-linear factor.
        if (model.stress_bases().size() == 1 &&
            model.stress_bases()[0].kind() == Basis::Kind::SimpleLinear &&
            scenario.use_condition(0) <= 0.0) {
            for (int m = 2; m <= 5; ++m) {
                ApproximateDesign um = uniform_grid_design(m);
                rep.benchmarks["uniform_m" + std::to_string(m)] =
                    efficiency(um, xi, model, c).value;
            }
            rep.benchmarks["uniform_minf"] = eff_uniform_grid(0, scenario.use_condition(0));
        }
    }
    return rep;
}

}  // namespace adt
