#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adt/errors.hpp"
#include "adt/failure_time.hpp"
#include "adt/linalg.hpp"
#include "adt/scenario_io.hpp"
#include "adt/stats.hpp"
#include "test_util.hpp"

using namespace adt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Scenario example(int i) {
    return load_scenario(std::string(ADT_DATA_DIR) + "/example" + std::to_string(i) +
                         ".json");
}

}  // namespace

TEST_CASE("use_profile contracts beta with f1(x_u)") {
    SUBCASE("example 1: mu(t) = 2.306 + 1.014 t") {
        UseConditionProfile p = use_profile(example(1));
        CHECK(p.delta(0) == doctest::Approx(2.306).epsilon(0.001));
        CHECK(p.delta(1) == doctest::Approx(1.014).epsilon(0.001));
    }
    SUBCASE("example 2: delta = (3.31, 1.08)") {
        UseConditionProfile p = use_profile(example(2));
        CHECK(p.delta(0) == doctest::Approx(3.31).epsilon(0.001));
        CHECK(p.delta(1) == doctest::Approx(1.081).epsilon(0.001));
    }
    SUBCASE("zero use condition returns the constant-stress block") {
        Scenario sc = example(2);
        sc.use_condition.setZero();
        UseConditionProfile p = use_profile(sc);
        CHECK(p.delta(0) == doctest::Approx(4.0));
        CHECK(p.delta(1) == doctest::Approx(0.5));
    }
}

TEST_CASE("h and the failure-time distribution") {
    SUBCASE("example 1 range of h") {
        UseConditionProfile p = use_profile(example(1));
        CHECK(p.h(0.0) == doctest::Approx(-14.03).epsilon(0.01));
        CHECK(p.h_limit() == doctest::Approx(9.67).epsilon(0.01));
    }
    SUBCASE("example 2 range of h and alpha_max") {
        UseConditionProfile p = use_profile(example(2));
        CHECK(p.h(0.0) == doctest::Approx(-15.83).epsilon(0.01));
        CHECK(p.h_limit() == doctest::Approx(1.54).epsilon(0.01));
        CHECK(p.alpha_max() == doctest::Approx(0.939).epsilon(0.01));
    }
    SUBCASE("F at the median is exactly one half") {
        UseConditionProfile p = use_profile(example(1));
        QuantileResult q = quantile(p, 0.5);
        CHECK(p.failure_cdf(q.t) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("degenerate variance raises") {
        Scenario sc = example(1);
        sc.varcomps.sigma_gamma.setZero();
        UseConditionProfile p = use_profile(sc);
        CHECK_THROWS_AS(p.sigma_u(0.5), DegenerateError);
    }
}

TEST_CASE("quantiles: medians, linear special case, degeneracy markers") {
    SUBCASE("example 1 median 1.583") {
        UseConditionProfile p = use_profile(example(1));
        QuantileResult q = quantile(p, 0.5);
        REQUIRE(q.ok());
        CHECK(q.t == doctest::Approx(1.583).epsilon(0.001));
        CHECK(q.c0 == doctest::Approx(1.0 / p.delta(1)).epsilon(1e-10));
    }
    SUBCASE("example 2 median 10.25") {
        UseConditionProfile p = use_profile(example(2));
        QuantileResult q = quantile(p, 0.5);
        REQUIRE(q.ok());
        CHECK(q.t == doctest::Approx(10.25).epsilon(0.001));
    }
    SUBCASE("random-intercept-only model solves the linear equation") {
        Scenario sc = example(1);
        sc.beta = VectorXd::Zero(4);
        sc.beta(1) = 1.0;  // delta = (0, 1) at x_u = 0
        sc.use_condition.setZero();
        sc.threshold = 1.0;
        sc.varcomps = VarianceComponents::from_sigmas(1.0, 0.0, 0.0, 0.5);
        UseConditionProfile p = use_profile(sc);
        QuantileResult q = quantile(p, 0.5);
        REQUIRE(q.ok());
        CHECK(q.t == doctest::Approx(1.0).epsilon(1e-10));
        // t_alpha = (y0 - d1 + z_a sigma1)/d2 where it stays positive
        QuantileResult q30 = quantile(p, 0.3);
        CHECK(q30.t == doctest::Approx(1.0 + normal_quantile(0.3)).epsilon(1e-9));
        // below F(0) = Phi(-1) the quantile degenerates to zero
        CHECK(quantile(p, 0.1).status == QuantileStatus::AtZero);
    }
    SUBCASE("alpha above alpha_max is flagged infinite") {
        UseConditionProfile p = use_profile(example(2));
        QuantileResult q = quantile(p, 0.95);
        CHECK(q.status == QuantileStatus::Infinite);
        CHECK(std::isinf(q.t));
    }
    SUBCASE("alpha below F(0) is flagged at-zero") {
        Scenario sc = example(1);
        sc.use_condition.setZero();
        sc.threshold = sc.beta(0);  // threshold met at t=0 for half the units
        UseConditionProfile p = use_profile(sc);
        QuantileResult q = quantile(p, 0.25);
        CHECK(q.status == QuantileStatus::AtZero);
    }
    SUBCASE("quantiles are nondecreasing in alpha") {
        UseConditionProfile p = use_profile(example(1));
        double prev = 0.0;
        for (double a : {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
            QuantileResult q = quantile(p, a);
            REQUIRE(q.ok());
            CHECK(q.t >= prev);
            prev = q.t;
        }
    }
    SUBCASE("round trip h(t_alpha) = z_alpha to 1e-9") {
        for (int i : {1, 2}) {
            UseConditionProfile p = use_profile(example(i));
            for (double a : {0.01, 0.1, 0.5, 0.9}) {
                QuantileResult q = quantile(p, a);
                if (!q.ok()) continue;
                CHECK(std::abs(p.h(q.t) - normal_quantile(a)) < 1e-9);
            }
        }
    }
    SUBCASE("degeneracy boundaries and the 5% existence rule") {
        Scenario sc = example(1);
        UseConditionProfile p = use_profile(sc);
        const double d1 = p.delta(0), d2 = p.delta(1);
        const double s1 = std::sqrt(p.sigma_gamma(0, 0));
        const double s2 = std::sqrt(p.sigma_gamma(1, 1));
        // t_alpha > 0 iff z > -(y0-d1)/s1; t_alpha < inf iff z < d2/s2.
        CHECK(p.h(0.0) == doctest::Approx(-(sc.threshold - d1) / s1).epsilon(1e-12));
        CHECK(p.h_limit() == doctest::Approx(d2 / s2).epsilon(1e-12));
        // 5% rule: sigma1 < 0.608 (y0 - d1) iff t_{0.05} > 0.
        auto exists_5pct = [&](double sigma1) {
            Scenario probe = sc;
            probe.varcomps = VarianceComponents::from_sigmas(sigma1, 0.105, -0.143, 0.048);
            return quantile(use_profile(probe), 0.05).ok();
        };
        const double bound = 0.608 * (sc.threshold - d1);
        CHECK(exists_5pct(0.99 * bound));
        CHECK_FALSE(exists_5pct(1.01 * bound));
    }
}

TEST_CASE("h is strictly increasing over [0, 10 t_half] for both nominal sets") {
    for (int i : {1, 2}) {
        UseConditionProfile p = use_profile(example(i));
        QuantileResult med = quantile(p, 0.5);
        REQUIRE(med.ok());
        const double hi = 10.0 * med.t;
        double prev = p.h(0.0);
        bool increasing = true;
        for (int j = 1; j <= 10000; ++j) {
            const double h = p.h(hi * j / 10000.0);
            if (h <= prev) increasing = false;
            prev = h;
        }
        CHECK(increasing);
    }
}

TEST_CASE("general monotone path falls back to bisection") {
    // Quadratic time trend keeps h monotone but non-linear.
    auto f2 = Basis::custom(
        1,
        {[](const VectorXd&) { return 1.0; }, [](const VectorXd& t) { return t(0); },
         [](const VectorXd& t) { return t(0) * t(0); }},
        {[](const VectorXd&) { return 0.0; }, [](const VectorXd&) { return 1.0; },
         [](const VectorXd& t) { return 2.0 * t(0); }},
        VectorXd::Zero(1), VectorXd::Ones(1), true);
    VectorXd delta(3);
    delta << 1.0, 0.8, 0.2;
    MatrixXd sg = MatrixXd::Zero(3, 3);
    sg(0, 0) = 0.25;
    sg(1, 1) = 0.01;
    UseConditionProfile prof{delta, VectorXd::Ones(1), f2, sg, 4.0};
    QuantileResult q = quantile(prof, 0.5);
    REQUIRE(q.ok());
    CHECK(std::abs(prof.h(q.t) - 0.0) < 1e-9);
    CHECK(prof.mu(q.t) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("gradient_varsigma analytic vs finite differences") {
    Scenario sc = example(1);
    UseConditionProfile p = use_profile(sc);
    VcParametrization param = vc_sigma_pair(sc.varcomps);

    SUBCASE("median gradient is exactly zero") {
        VectorXd g = gradient_varsigma(p, 0.5, param);
        CHECK(g.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("rho component matches the closed form") {
        const double alpha = 0.1;
        const double z = normal_quantile(alpha);
        QuantileResult q = quantile(p, alpha);
        REQUIRE(q.ok());
        VectorXd g = gradient_varsigma(p, alpha, param);
        const double s1 = 0.114, s2 = 0.105;
        CHECK(g(2) == doctest::Approx(-z * s1 * s2 * q.t / p.sigma_u(q.t)).epsilon(1e-9));
        CHECK(g(3) == 0.0);  // sigma_u does not involve sigma_eps
    }

    SUBCASE("analytic equals central differences to 1e-6") {
        VcParametrization fd = param;
        fd.d_sigma_gamma = nullptr;
        fd.d_sigma_eps_dense = nullptr;
        VectorXd ga = gradient_varsigma(p, 0.1, param);
        VectorXd gf = gradient_varsigma(p, 0.1, fd);
        CHECK((ga - gf).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("avar_quantile: decomposition, factorization, scaling") {
    Scenario sc = example(1);
    ApproximateDesign xi = ApproximateDesign::make1d(
        {0.0, 1.0}, {1.0 - 0.056 / 1.112, 0.056 / 1.112});

    SUBCASE("median keeps only the beta term") {
        AvarBreakdown b = avar_quantile_detail(sc, xi, sc.time_plan, 0.5);
        CHECK(b.varsigma_term == 0.0);
        CHECK(b.total == b.beta_term);
    }

    SUBCASE("factorized evaluation equals dense evaluation") {
        UseConditionProfile p = use_profile(sc);
        for (double alpha : {0.5, 0.2}) {
            QuantileResult q = quantile(p, alpha);
            REQUIRE(q.ok());
            MatrixXd F2 = build_time_matrix(sc.time_plan, sc.model.time_basis());
            MatrixXd V = response_covariance(F2, sc.varcomps);
            MatrixXd M1 = stress_info(xi, sc.model);
            MatrixXd M2 = F2.transpose() * linalg::spd_solve(V, F2, "V");
            MatrixXd Mb = linalg::kron(M1, M2);
            VectorXd cb = q.grad_beta;
            VectorXd dense_sol = linalg::spd_solve(Mb, cb, "Mb");
            const double dense = q.c0 * q.c0 * cb.dot(dense_sol);
            AvarBreakdown b = avar_quantile_detail(sc, xi, sc.time_plan, alpha);
            CHECK(b.beta_term == doctest::Approx(dense).epsilon(1e-9));
        }
    }

    SUBCASE("nonmedian quantiles add a nonnegative varsigma term") {
        AvarBreakdown b = avar_quantile_detail(sc, xi, sc.time_plan, 0.2);
        CHECK(b.varsigma_term > 0.0);
        CHECK(b.total == doctest::Approx(b.beta_term + b.varsigma_term));
    }

    SUBCASE("efficiency lower bound: equality at the median, above it elsewhere") {
        ApproximateDesign u2 = uniform_grid_design(2);
        UseConditionProfile p = use_profile(sc);
        EfficiencyValue effc = efficiency(u2, xi, sc.model, p.f1_xu);
        CHECK(efficiency_avar(sc, u2, xi, sc.time_plan, 0.5) ==
              doctest::Approx(effc.value).epsilon(1e-10));
        CHECK(efficiency_avar(sc, u2, xi, sc.time_plan, 0.2) >= effc.value - 1e-12);
    }

    SUBCASE("degenerate quantile raises") {
        Scenario bad = example(2);
        CHECK_THROWS_AS(avar_quantile(bad, xi, bad.time_plan, 0.95), DegenerateError);
    }
}
