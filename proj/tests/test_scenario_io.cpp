#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adt/errors.hpp"
#include "adt/scenario_io.hpp"
#include "adt/stress_design.hpp"

using namespace adt;
using Eigen::VectorXd;

namespace {

Scenario example(int i) {
    return load_scenario(std::string(ADT_DATA_DIR) + "/example" + std::to_string(i) +
                         ".json");
}

}  // namespace

TEST_CASE("scenario files load with consistent dimensions") {
    Scenario s1 = example(1);
    CHECK(s1.model.p1() == 2);
    CHECK(s1.model.p2() == 2);
    CHECK(s1.beta.size() == 4);
    CHECK(s1.time_plan.size() == 11);
    CHECK(s1.time_grid.present);

    Scenario s2 = example(2);
    CHECK(s2.model.p1() == 4);
    CHECK(s2.beta.size() == 8);
    CHECK(s2.use_condition.size() == 2);

    Scenario s3 = example(3);
    CHECK(s3.model.p1() == 3);
    CHECK(s3.beta.size() == 6);
}

TEST_CASE("parser rejects malformed documents") {
    CHECK_THROWS_AS(parse_scenario_json("{"), DomainError);
    CHECK_THROWS_AS(parse_scenario_json("{}"), DomainError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), DomainError);

    SUBCASE("unknown keys anywhere") {
        std::string text = R"({
          "model": {"stress_bases": [{"kind": "linear-with-intercept"}],
                    "time_basis": {"kind": "linear-with-intercept"}},
          "beta": [1, 1, 1, 1],
          "variance": {"sigma1": 0.1, "sigma2": 0.1, "rho": 0, "sigma_eps": 0.1},
          "use_condition": [-0.5],
          "threshold": 10.0,
          "alpha": 0.5,
          "surprise": true
        })";
        CHECK_THROWS_WITH_AS(parse_scenario_json(text),
                             doctest::Contains("unknown key 'surprise'"), DomainError);
    }

    SUBCASE("dimension mismatches") {
        std::string text = R"({
          "model": {"stress_bases": [{"kind": "linear-with-intercept"}],
                    "time_basis": {"kind": "linear-with-intercept"}},
          "beta": [1, 1, 1],
          "variance": {"sigma1": 0.1, "sigma2": 0.1, "rho": 0, "sigma_eps": 0.1},
          "use_condition": [-0.5],
          "threshold": 10.0
        })";
        CHECK_THROWS_AS(parse_scenario_json(text), DomainError);
    }

    SUBCASE("wrong value types surface as domain errors") {
        std::string text = R"({
          "model": {"stress_bases": [{"kind": "linear-with-intercept"}],
                    "time_basis": {"kind": "linear-with-intercept"}},
          "beta": [1, "two", 1, 1],
          "variance": {"sigma1": 0.1, "sigma2": 0.1, "rho": 0, "sigma_eps": 0.1},
          "use_condition": [-0.5],
          "threshold": 10.0
        })";
        CHECK_THROWS_AS(parse_scenario_json(text), DomainError);
    }

    SUBCASE("invalid correlation") {
        std::string text = R"({
          "model": {"stress_bases": [{"kind": "linear-with-intercept"}],
                    "time_basis": {"kind": "linear-with-intercept"}},
          "beta": [1, 1, 1, 1],
          "variance": {"sigma1": 0.1, "sigma2": 0.1, "rho": 1.5, "sigma_eps": 0.1},
          "use_condition": [-0.5],
          "threshold": 10.0
        })";
        CHECK_THROWS_AS(parse_scenario_json(text), DomainError);
    }
}

TEST_CASE("explicit variance matrices parse") {
    std::string text = R"({
      "model": {"stress_bases": [{"kind": "linear-with-intercept"}],
                "time_basis": {"kind": "linear-with-intercept"}},
      "beta": [1, 1, 1, 1],
      "variance": {"sigma_gamma": [[0.04, 0.001], [0.001, 0.02]],
                   "sigma_eps": 0.3, "rho_eps": 0.2},
      "use_condition": [-0.5],
      "threshold": 10.0
    })";
    Scenario sc = parse_scenario_json(text);
    CHECK(sc.varcomps.sigma_gamma(0, 0) == doctest::Approx(0.04));
    CHECK(sc.varcomps.sigma_eps.kind() == ErrorCov::Kind::CompoundSymmetry);
    Eigen::MatrixXd Se = sc.varcomps.sigma_eps.materialize(3);
    CHECK(Se(0, 1) == doctest::Approx(0.09 * 0.2));
}

TEST_CASE("design CSV round trip preserves the criterion") {
    Scenario sc = example(1);
    DesignReport rep = optimal_stress_for_quantile(sc, 101, false);
    std::string csv = design_to_csv(rep.design, {"x1"});
    ApproximateDesign back = design_from_csv(csv);
    UseConditionProfile prof = use_profile(sc);
    const double c0 = c_criterion(rep.design, sc.model, prof.f1_xu).value;
    const double c1 = c_criterion(back, sc.model, prof.f1_xu).value;
    CHECK(std::abs(c1 - c0) <= 1e-12 * std::max(1.0, std::abs(c0)));

    SUBCASE("serialization carries 12 significant digits") {
        CHECK(csv.find("0.94964028777") != std::string::npos);
    }

    SUBCASE("malformed CSV is rejected") {
        CHECK_THROWS_AS(design_from_csv("x,weight\n"), DomainError);
        CHECK_THROWS_AS(design_from_csv("x,weight\n0.0,abc\n"), DomainError);
        CHECK_THROWS_AS(design_from_csv("x,weight\n0.0,0.4\n1.0,0.4\n"), DomainError);
    }
}

TEST_CASE("reports serialize deterministically") {
    Scenario sc = example(1);
    DesignReport rep = optimal_stress_for_quantile(sc, 101, true);
    std::string a = design_report_to_json(rep);
    std::string b = design_report_to_json(rep);
    CHECK(a == b);
    CHECK(a.find("\"criterion\"") != std::string::npos);
    CHECK(a.find("\"benchmarks\"") != std::string::npos);

    FailureTimeSummary s = failure_time_summary(sc, 0.5);
    std::string j = failure_time_summary_json(s);
    CHECK(j.find("\"median\"") != std::string::npos);
    CHECK(j.find("\"status\": \"ok\"") != std::string::npos);

    std::string curve = failure_time_curve_csv(sc, 3.0, 31);
    CHECK(curve.rfind("t,h,F\n", 0) == 0);
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 32);
}
