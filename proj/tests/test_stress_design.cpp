#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adt/errors.hpp"
#include "adt/linalg.hpp"
#include "adt/scenario_io.hpp"
#include "adt/stress_design.hpp"
#include "test_util.hpp"

using namespace adt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Scenario example(int i) {
    return load_scenario(std::string(ADT_DATA_DIR) + "/example" + std::to_string(i) +
                         ".json");
}

FeatureMap basis_map(const Basis& b) {
    return [b](const VectorXd& x) { return b.eval(x); };
}

std::vector<VectorXd> grid1d(int n) {
    return make_grid(VectorXd::Zero(1), VectorXd::Ones(1), n);
}

double weight_at(const ApproximateDesign& d, const VectorXd& pt) {
    for (int i = 0; i < d.size(); ++i)
        if ((d.support[i] - pt).cwiseAbs().maxCoeff() < 1e-7) return d.weights(i);
    return 0.0;
}

VectorXd pt2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("two-point extrapolation weights") {
    ApproximateDesign d = extrapolation_two_point(-0.056);
    CHECK(weight_at(d, VectorXd::Zero(1)) == doctest::Approx(0.95).epsilon(0.005));
    CHECK(weight_at(d, VectorXd::Ones(1)) == doctest::Approx(0.05).epsilon(0.01));

    CHECK(weight_at(extrapolation_two_point(-0.5), VectorXd::Ones(1)) ==
          doctest::Approx(0.25));
    CHECK(weight_at(extrapolation_two_point(-0.4), VectorXd::Ones(1)) ==
          doctest::Approx(0.4 / 1.8));
    CHECK(weight_at(extrapolation_two_point(-1.0), VectorXd::Ones(1)) ==
          doctest::Approx(1.0 / 3.0));

    ApproximateDesign at0 = extrapolation_two_point(0.0);
    CHECK(at0.size() == 1);
    CHECK(at0.support[0](0) == 0.0);

    CHECK_THROWS_AS(extrapolation_two_point(0.2), DomainError);
}

TEST_CASE("elfving_solve matches the closed form in the simple linear model") {
    Basis lin = Basis::simple_linear();
    VectorXd c(2);
    c << 1.0, -0.056;
    ElfvingSolution sol = elfving_solve(basis_map(lin), grid1d(101), c);
    ApproximateDesign closed = extrapolation_two_point(-0.056);
    REQUIRE(sol.design.size() == 2);
    CHECK(weight_at(sol.design, VectorXd::Zero(1)) ==
          doctest::Approx(weight_at(closed, VectorXd::Zero(1))).epsilon(1e-6));
    CHECK(sol.criterion == doctest::Approx(1.112 * 1.112).epsilon(1e-9));
    // sign pattern: the point nearest the target comes from the mirror image
    for (size_t i = 0; i < sol.signs.size(); ++i) {
        const double x = sol.design.support[i](0);
        if (x == 0.0) CHECK(sol.signs[i] == -sol.signs[(i + 1) % 2]);
    }

    SUBCASE("interpolation at a grid point gives lambda = 1 and a point design") {
        VectorXd cg(2);
        cg << 1.0, 0.5;
        ElfvingSolution si = elfving_solve(basis_map(lin), grid1d(101), cg);
        CHECK(si.lambda == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(si.design.size() == 1);
        CHECK(si.design.support[0](0) == doctest::Approx(0.5));
    }

    SUBCASE("c outside the span raises") {
        std::vector<VectorXd> single{VectorXd::Constant(1, 0.3)};
        VectorXd bad(2);
        bad << 0.3, -1.0;  // not collinear with f(0.3) = (1, 0.3)
        CHECK_THROWS_AS(elfving_solve(basis_map(lin), single, bad), DomainError);
    }

    SUBCASE("criterion equals the direct c-criterion of the returned design") {
        VectorXd ct(2);
        ct << 1.0, -0.7;
        ElfvingSolution s = elfving_solve(basis_map(lin), grid1d(101), ct);
        MatrixXd M = design_info(s.design, basis_map(lin));
        CValue direct = c_criterion_info(M, ct);
        CHECK(s.criterion == doctest::Approx(direct.value).epsilon(1e-8));
    }

    SUBCASE("lambda is nondecreasing under grid refinement") {
        VectorXd ct(2);
        ct << 1.0, -0.3;
        double prev = 0.0;
        for (int n : {6, 11, 21, 41, 101}) {
            ElfvingSolution s = elfving_solve(basis_map(lin), grid1d(n), ct);
            CHECK(s.lambda >= prev - 1e-12);
            prev = s.lambda;
        }
    }
}

TEST_CASE("additive model: closed family and LP agree at criterion 4.00") {
    Basis add = Basis::additive_linear(2);
    VectorXd c(3);
    c << 1.0, -0.5, -0.4;

    SUBCASE("family endpoints reproduce the displayed designs") {
        ApproximateDesign xi0 = additive_family(-0.5, -0.4, 0.0);
        CHECK(weight_at(xi0, pt2(0, 0)) == doctest::Approx(0.70));
        CHECK(weight_at(xi0, pt2(0, 1)) == doctest::Approx(0.05));
        CHECK(weight_at(xi0, pt2(1, 1)) == doctest::Approx(0.25));
        CHECK(xi0.size() == 3);

        ApproximateDesign xi1 = additive_family(-0.5, -0.4, 1.0);
        CHECK(weight_at(xi1, pt2(0, 0)) == doctest::Approx(0.75));
        CHECK(weight_at(xi1, pt2(1, 0)) == doctest::Approx(0.05));
        CHECK(weight_at(xi1, pt2(1, 1)) == doctest::Approx(0.20));
    }

    SUBCASE("every member shares the criterion (1 + 2|xu1|)^2") {
        for (double a : {0.0, 0.3, 0.5, 0.8, 1.0}) {
            ApproximateDesign xia = additive_family(-0.5, -0.4, a);
            CValue v = c_criterion_info(design_info(xia, basis_map(add)), c);
            CHECK(v.feasible);
            CHECK(v.value == doctest::Approx(4.0).epsilon(1e-10));
        }
    }

    SUBCASE("role swap and equality rejection") {
        ApproximateDesign swapped = additive_family(-0.4, -0.5, 0.0);
        CHECK(weight_at(swapped, pt2(0, 0)) == doctest::Approx(0.70));
        CHECK(weight_at(swapped, pt2(1, 0)) == doctest::Approx(0.05));
        CHECK(weight_at(swapped, pt2(1, 1)) == doctest::Approx(0.25));
        CHECK_THROWS_AS(additive_family(-0.5, -0.5, 0.5), DegenerateError);
    }

    SUBCASE("LP over the 2-d grid certifies the same optimum") {
        auto grid = make_grid(VectorXd::Zero(2), VectorXd::Ones(2), 21);
        ElfvingSolution sol = elfving_solve(basis_map(add), grid, c);
        CHECK(sol.criterion == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(verify_c_optimality(sol.design, basis_map(add), grid, c) <= 1e-6);
        // the family members certify on the same grid as well
        ApproximateDesign xi0 = additive_family(-0.5, -0.4, 0.0);
        CHECK(verify_c_optimality(xi0, basis_map(add), grid, c) <= 1e-6);
    }

    SUBCASE("2-d grid refinement keeps lambda nondecreasing") {
        double prev = 0.0;
        for (int n : {3, 6, 11, 21, 41}) {
            auto grid = make_grid(VectorXd::Zero(2), VectorXd::Ones(2), n);
            ElfvingSolution s = elfving_solve(basis_map(add), grid, c);
            CHECK(s.lambda >= prev - 1e-12);
            prev = s.lambda;
        }
        CHECK(prev == doctest::Approx(0.5).epsilon(1e-9));
    }

    SUBCASE("deep extrapolation keeps the closed-form criterion") {
        VectorXd cfar(3);
        cfar << 1.0, -3.0, -2.9;
        auto grid = make_grid(VectorXd::Zero(2), VectorXd::Ones(2), 21);
        ElfvingSolution sol = elfving_solve(basis_map(add), grid, cfar);
        CHECK(sol.criterion == doctest::Approx(49.0).epsilon(1e-9));
        ApproximateDesign fam = additive_family(-3.0, -2.9, 0.4);
        CValue v = c_criterion_info(design_info(fam, basis_map(add)), cfar);
        CHECK(v.value == doctest::Approx(49.0).epsilon(1e-10));
    }
}

TEST_CASE("verify_c_optimality separates optima from suboptimal designs") {
    Basis lin = Basis::simple_linear();
    VectorXd c(2);
    c << 1.0, -0.5;
    ApproximateDesign opt = extrapolation_two_point(-0.5);
    CHECK(verify_c_optimality(opt, basis_map(lin), grid1d(101), c) <= 1e-6);

    ApproximateDesign u2 = uniform_grid_design(2);
    CHECK(verify_c_optimality(u2, basis_map(lin), grid1d(101), c) > 0.01);

    ApproximateDesign one = ApproximateDesign::make1d({0.4}, {1.0});
    VectorXd cg(2);
    cg << 1.0, 0.4;
    CHECK(verify_c_optimality(one, basis_map(lin), grid1d(101), cg) ==
          doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("optimal_stress_for_quantile builds certified product designs") {
    SUBCASE("example 1: 0.95 / 0.05") {
        DesignReport rep = optimal_stress_for_quantile(example(1), 101, true);
        CHECK(weight_at(rep.design, VectorXd::Zero(1)) == doctest::Approx(0.95).epsilon(0.005));
        CHECK(rep.certificate_gap <= 1e-6);
        CHECK(rep.alpha_independent);
        CHECK(rep.benchmarks.at("uniform_m2") == doctest::Approx(0.55).epsilon(0.01));
        CHECK(rep.full_model_estimable);
    }

    SUBCASE("example 2: product design 0.58/0.17/0.19/0.06") {
        DesignReport rep = optimal_stress_for_quantile(example(2), 101, true);
        REQUIRE(rep.design.size() == 4);
        CHECK(weight_at(rep.design, pt2(0, 0)) == doctest::Approx(0.58).epsilon(0.01));
        CHECK(weight_at(rep.design, pt2(0, 1)) == doctest::Approx(0.17).epsilon(0.02));
        CHECK(weight_at(rep.design, pt2(1, 0)) == doctest::Approx(0.19).epsilon(0.02));
        CHECK(weight_at(rep.design, pt2(1, 1)) == doctest::Approx(0.06).epsilon(0.05));
        CHECK(rep.certificate_gap <= 1e-6);
        CHECK(rep.benchmarks.at("uniform_vertices") == doctest::Approx(0.61).epsilon(0.01));
    }

    SUBCASE("alpha does not move the design") {
        Scenario sc = example(1);
        sc.alpha = 0.1;
        DesignReport a = optimal_stress_for_quantile(sc);
        sc.alpha = 0.5;
        DesignReport b = optimal_stress_for_quantile(sc);
        REQUIRE(a.design.size() == b.design.size());
        for (int i = 0; i < a.design.size(); ++i)
            CHECK(a.design.weights(i) == doctest::Approx(b.design.weights(i)).epsilon(1e-12));
    }

    SUBCASE("example 3 additive: criterion 4.00, benchmark 0.49") {
        DesignReport rep = optimal_stress_for_quantile(example(3), 101, true);
        CHECK(rep.criterion == doctest::Approx(4.0).epsilon(1e-6));
        CHECK(rep.certificate_gap <= 1e-6);
        CHECK(rep.benchmarks.at("uniform_vertices") == doctest::Approx(0.49).epsilon(0.01));
    }

    SUBCASE("product criterion equals the product of marginal criteria") {
        Scenario sc = example(2);
        DesignReport rep = optimal_stress_for_quantile(sc);
        CHECK(rep.criterion == doctest::Approx(4.0 * 1.8 * 1.8).epsilon(1e-9));
    }
}

TEST_CASE("kronecker-basis LP agrees with the product construction") {
    Scenario sc = example(2);
    const ProductModel& model = sc.model;
    VectorXd c = model.f1(sc.use_condition);
    auto grid = stress_grid(model, 21);
    ElfvingSolution sol = elfving_solve(
        [&](const VectorXd& x) { return model.f1(x); }, grid, c);
    CHECK(sol.criterion == doctest::Approx(4.0 * 3.24).epsilon(1e-6));
}
