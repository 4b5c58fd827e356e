#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include <json.hpp>

#include "adt/adt.h"

using nlohmann::json;

namespace {

std::string data_path(int i) {
    return std::string(ADT_DATA_DIR) + "/example" + std::to_string(i) + ".json";
}

struct Scen {
    adt_scenario* s = nullptr;
    explicit Scen(int i) {
        REQUIRE(adt_scenario_load(data_path(i).c_str(), &s) == ADT_OK);
    }
    ~Scen() { adt_scenario_free(s); }
};

struct Str {
    char* s = nullptr;
    ~Str() { adt_string_free(s); }
};

struct Des {
    adt_design* d = nullptr;
    ~Des() { adt_design_free(d); }
};

}  // namespace

TEST_CASE("scenario loading and error reporting") {
    adt_scenario* s = nullptr;
    CHECK(adt_scenario_load("/no/such/file.json", &s) == ADT_ERR_INPUT);
    CHECK(std::strlen(adt_last_error()) > 0);
    CHECK(adt_scenario_parse("{ not json", &s) == ADT_ERR_INPUT);
    CHECK(adt_scenario_parse(nullptr, &s) == ADT_ERR_INPUT);
    CHECK(adt_scenario_load(data_path(1).c_str(), &s) == ADT_OK);
    adt_scenario_free(s);
    CHECK(std::string(adt_version()) == "1.0.0");
}

TEST_CASE("failure-time report over the C boundary") {
    Scen sc(1);
    Str rep;
    CHECK(adt_failure_time(sc.s, 0.5, &rep.s) == ADT_OK);
    json j = json::parse(rep.s);
    CHECK(j["median"].get<double>() == doctest::Approx(1.583).epsilon(0.001));
    CHECK(j["status"] == "ok");

    Scen sc2(2);
    Str rep2;
    CHECK(adt_failure_time(sc2.s, 0.95, &rep2.s) == ADT_ERR_DEGENERATE);
    json j2 = json::parse(rep2.s);
    CHECK(j2["status"] == "infinite");
    CHECK(j2["alpha_max"].get<double>() == doctest::Approx(0.939).epsilon(0.005));

    Str curve;
    CHECK(adt_failure_time_curve(sc.s, 3.0, 11, &curve.s) == ADT_OK);
    CHECK(std::string(curve.s).rfind("t,h,F\n", 0) == 0);
}

TEST_CASE("stress design handle + CSV round trip") {
    Scen sc(1);
    Des d;
    Str rep;
    CHECK(adt_design_stress(sc.s, 0, 1, &d.d, &rep.s) == ADT_OK);
    json j = json::parse(rep.s);
    CHECK(j["criterion"].get<double>() == doctest::Approx(1.2366).epsilon(1e-3));
    CHECK(j["certificate_gap"].get<double>() <= 1e-6);
    CHECK(j["benchmarks"]["uniform_m2"].get<double>() == doctest::Approx(0.55).epsilon(0.01));

    Str csv;
    CHECK(adt_design_csv(d.d, &csv.s) == ADT_OK);
    Des back;
    CHECK(adt_design_parse_csv(csv.s, &back.d) == ADT_OK);
    Str csv2;
    CHECK(adt_design_csv(back.d, &csv2.s) == ADT_OK);
    CHECK(std::string(csv.s) == csv2.s);

    Str eff;
    CHECK(adt_efficiency(sc.s, back.d, "stress", 0, &eff.s) == ADT_OK);
    json je = json::parse(eff.s);
    CHECK(je["efficiency"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("time design over the C boundary") {
    Scen sc(2);
    Des tau, tau0;
    Str rep, profile;
    CHECK(adt_design_time(sc.s, 0.05, 6, 0, 0.0, &tau.d, &tau0.d, &rep.s, &profile.s) ==
          ADT_OK);
    json j = json::parse(rep.s);
    CHECK(j["converged"].get<bool>());
    CHECK(j["certificate_gap"].get<double>() <= 1e-6);
    CHECK(j["benchmarks"]["adjusted_exact_plan_efficiency"].get<double>() >= 0.972);
    std::string prof = profile.s;
    CHECK(prof.rfind("t,weight\n", 0) == 0);
    CHECK(std::count(prof.begin(), prof.end(), '\n') == 22);

    // evaluating the adjusted exact plan in the time family
    Str eff;
    CHECK(adt_efficiency(sc.s, tau0.d, "time", 6, &eff.s) == ADT_OK);
    json je = json::parse(eff.s);
    CHECK(je["efficiency"].get<double>() >= 0.972);
    CHECK(je["efficiency"].get<double>() <= 1.0 + 1e-9);
}

TEST_CASE("destructive design and sensitivity CSVs") {
    Scen sc(1);
    Des d;
    Str rep;
    CHECK(adt_design_destructive(sc.s, 0, &d.d, &rep.s) == ADT_OK);
    json j = json::parse(rep.s);
    CHECK(j["certificate_gap"].get<double>() <= 1e-6);
    CHECK(j["design"]["weights"].size() == 4);

    Str th, ra;
    CHECK(adt_sensitivity(sc.s, 10, &th.s, &ra.s) == ADT_OK);
    const std::string th_csv = th.s, ra_csv = ra.s;
    CHECK(th_csv.rfind("probe_value,eff_optimal,eff_uniform2,eff_uniform6\n", 0) == 0);
    CHECK(std::count(ra_csv.begin(), ra_csv.end(), '\n') == 11);

    Str eff;
    CHECK(adt_efficiency(sc.s, d.d, "destructive", 0, &eff.s) == ADT_OK);
    json je = json::parse(eff.s);
    CHECK(je["efficiency"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
    Str bad;
    CHECK(adt_efficiency(sc.s, d.d, "nonsense", 0, &bad.s) == ADT_ERR_INPUT);
}

TEST_CASE("simulation and validation over the C boundary") {
    Scen sc(1);
    Str obs;
    CHECK(adt_simulate(sc.s, nullptr, 12, 7, &obs.s) == ADT_OK);
    std::string o = obs.s;
    CHECK(std::count(o.begin(), o.end(), '\n') == 13);

    Str obs_again;
    CHECK(adt_simulate(sc.s, nullptr, 12, 7, &obs_again.s) == ADT_OK);
    CHECK(o == obs_again.s);  // byte-stable for a fixed seed

    Str rep, reps_csv;
    CHECK(adt_validate(sc.s, nullptr, 40, 60, 1, 0.5, &rep.s, &reps_csv.s) == ADT_OK);
    json j = json::parse(rep.s);
    CHECK(j["replications"].get<long>() == 60);
    CHECK(j["degenerate_count"].get<long>() == 0);
    CHECK(j["ratio"].get<double>() > 0.5);
    CHECK(j["ratio"].get<double>() < 1.6);
    const std::string reps_text = reps_csv.s;
    CHECK(std::count(reps_text.begin(), reps_text.end(), '\n') == 61);

    // invalid design path surfaces as an input error
    Des bad;
    CHECK(adt_design_load_csv("/no/such/design.csv", &bad.d) == ADT_ERR_INPUT);
}
