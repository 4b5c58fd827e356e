// Command-line planner for accelerated degradation tests, built entirely on
// the C API of the shared library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adt/adt.h"

namespace {

namespace fs = std::filesystem;

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { adt_string_free(s); }
};

struct ScenarioGuard {
    adt_scenario* s = nullptr;
    ~ScenarioGuard() { adt_scenario_free(s); }
};

struct DesignGuard {
    adt_design* d = nullptr;
    ~DesignGuard() { adt_design_free(d); }
};

int fail(adt_status st) {
    std::cerr << "error: " << adt_last_error() << "\n";
    return static_cast<int>(st);
}

int load_scenario_or_exit(const std::string& path, ScenarioGuard& sc) {
    adt_status st = adt_scenario_load(path.c_str(), &sc.s);
    if (st != ADT_OK) return fail(st);
    return 0;
}

void write_file(const fs::path& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    out << (text ? text : "");
    std::cout << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal planning for accelerated degradation tests"};
    app.require_subcommand(1);

    std::string scenario_path, design_path, out_dir = ".";
    double alpha = 0.0, grid_delta = 0.0, tol = 0.0, t_max = 0.0;
    int grid_points = 0, k = 0, csv_points = 201;
    long n_units = 100, reps = 200, max_iter = 0;
    std::uint64_t seed = 1;
    bool benchmark = false, emit_csv = false, sensitivity = false;

    auto* ft = app.add_subcommand("failure-time",
                                  "Failure-time distribution and quantiles at normal use");
    ft->add_option("scenario", scenario_path)->required();
    ft->add_option("--alpha", alpha, "quantile level (defaults to the scenario's)");
    ft->add_flag("--csv", emit_csv, "emit the (t, h, F) curve as CSV");
    ft->add_option("--t-max", t_max, "curve horizon (default 2*t_alpha)");
    ft->add_option("--grid", csv_points, "curve points");
    ft->add_option("--out-dir", out_dir);

    auto* design = app.add_subcommand("design", "Optimal design construction");
    design->require_subcommand(1);
    auto add_design_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path)->required();
        cmd->add_option("--out-dir", out_dir);
    };
    auto* dstress = design->add_subcommand("stress", "c-optimal stress design");
    add_design_common(dstress);
    dstress->add_option("--grid", grid_points, "candidate points per stress axis");
    dstress->add_flag("--benchmark", benchmark, "add uniform-design efficiencies");
    auto* dtime = design->add_subcommand("time", "constrained optimal time plan");
    add_design_common(dtime);
    dtime->add_option("--grid", grid_delta, "grid increment delta t");
    dtime->add_option("--k", k, "measurements per unit");
    dtime->add_option("--max-iter", max_iter);
    dtime->add_option("--tol", tol, "certificate gap tolerance");
    dtime->add_flag("--csv", emit_csv, "emit the weight profile CSV");
    auto* ddest = design->add_subcommand("destructive", "optimal cross-sectional plan");
    add_design_common(ddest);
    ddest->add_option("--grid", grid_points);
    ddest->add_flag("--sensitivity", sensitivity, "emit sensitivity curves CSV");

    auto* eff = app.add_subcommand("efficiency", "Evaluate a design from CSV");
    eff->add_option("scenario", scenario_path)->required();
    eff->add_option("design", design_path)->required();
    std::string family = "stress";
    eff->add_option("--family", family, "stress | time | destructive");
    eff->add_option("--k", k, "measurements per unit (time family)");

    auto* val = app.add_subcommand("validate", "Monte Carlo validation of the variance");
    val->add_option("scenario", scenario_path)->required();
    val->add_option("--design", design_path, "stress design CSV (default: optimal)");
    val->add_option("--n", n_units, "units per replication");
    val->add_option("--reps", reps, "replications");
    val->add_option("--seed", seed);
    val->add_option("--alpha", alpha);
    val->add_option("--out-dir", out_dir);
    val->add_flag("--csv", emit_csv, "emit per-replication estimates");

    auto* sim = app.add_subcommand("simulate", "Draw synthetic degradation paths");
    sim->add_option("scenario", scenario_path)->required();
    sim->add_option("--design", design_path, "stress design CSV (default: optimal)");
    sim->add_option("--n", n_units, "number of units");
    sim->add_option("--seed", seed);
    sim->add_option("--out-dir", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    ScenarioGuard sc;
    if (int rc = load_scenario_or_exit(scenario_path, sc)) return rc;
    fs::create_directories(out_dir);

    if (ft->parsed()) {
        StringGuard report;
        adt_status st = adt_failure_time(sc.s, alpha, &report.s);
        if (report.s) std::cout << report.s;
        if (st != ADT_OK) return fail(st);
        if (emit_csv) {
            StringGuard curve;
            st = adt_failure_time_curve(sc.s, t_max, csv_points, &curve.s);
            if (st != ADT_OK) return fail(st);
            write_file(fs::path(out_dir) / "failure_time_curve.csv", curve.s);
        }
        return 0;
    }

    if (design->parsed()) {
        if (dstress->parsed()) {
            DesignGuard d;
            StringGuard report;
            adt_status st =
                adt_design_stress(sc.s, grid_points, benchmark ? 1 : 0, &d.d, &report.s);
            if (st != ADT_OK) return fail(st);
            StringGuard csv;
            if ((st = adt_design_csv(d.d, &csv.s)) != ADT_OK) return fail(st);
            std::cout << report.s;
            write_file(fs::path(out_dir) / "design_stress.csv", csv.s);
            write_file(fs::path(out_dir) / "report_stress.json", report.s);
            return 0;
        }
        if (dtime->parsed()) {
            DesignGuard tau, tau0;
            StringGuard report, profile;
            adt_status st = adt_design_time(sc.s, grid_delta, k, max_iter, tol, &tau.d,
                                            &tau0.d, &report.s, &profile.s);
            if (st != ADT_OK) return fail(st);
            StringGuard tau_csv, tau0_csv;
            if ((st = adt_design_csv(tau.d, &tau_csv.s)) != ADT_OK) return fail(st);
            if ((st = adt_design_csv(tau0.d, &tau0_csv.s)) != ADT_OK) return fail(st);
            std::cout << report.s;
            write_file(fs::path(out_dir) / "design_time.csv", tau_csv.s);
            write_file(fs::path(out_dir) / "design_time_exact.csv", tau0_csv.s);
            write_file(fs::path(out_dir) / "report_time.json", report.s);
            if (emit_csv)
                write_file(fs::path(out_dir) / "time_weight_profile.csv", profile.s);
            return 0;
        }
        if (ddest->parsed()) {
            DesignGuard d;
            StringGuard report;
            adt_status st = adt_design_destructive(sc.s, grid_points, &d.d, &report.s);
            if (st != ADT_OK) return fail(st);
            StringGuard csv;
            if ((st = adt_design_csv(d.d, &csv.s)) != ADT_OK) return fail(st);
            std::cout << report.s;
            write_file(fs::path(out_dir) / "design_destructive.csv", csv.s);
            write_file(fs::path(out_dir) / "report_destructive.json", report.s);
            if (sensitivity) {
                StringGuard th, ra;
                st = adt_sensitivity(sc.s, 50, &th.s, &ra.s);
                if (st != ADT_OK) return fail(st);
                write_file(fs::path(out_dir) / "sensitivity_t_half.csv", th.s);
                write_file(fs::path(out_dir) / "sensitivity_sigma_ratio.csv", ra.s);
            }
            return 0;
        }
    }

    if (eff->parsed()) {
        DesignGuard d;
        adt_status st = adt_design_load_csv(design_path.c_str(), &d.d);
        if (st != ADT_OK) return fail(st);
        StringGuard report;
        st = adt_efficiency(sc.s, d.d, family.c_str(), k, &report.s);
        if (st != ADT_OK) return fail(st);
        std::cout << report.s;
        return 0;
    }

    if (val->parsed()) {
        DesignGuard d;
        if (!design_path.empty()) {
            adt_status st = adt_design_load_csv(design_path.c_str(), &d.d);
            if (st != ADT_OK) return fail(st);
        }
        StringGuard report, csv;
        adt_status st = adt_validate(sc.s, d.d, n_units, reps, seed, alpha, &report.s,
                                     emit_csv ? &csv.s : nullptr);
        if (report.s) {
            std::cout << report.s;
            write_file(fs::path(out_dir) / "validation_report.json", report.s);
        }
        if (emit_csv && csv.s)
            write_file(fs::path(out_dir) / "validation_replicates.csv", csv.s);
        if (st != ADT_OK) return fail(st);
        return 0;
    }

    if (sim->parsed()) {
        DesignGuard d;
        if (!design_path.empty()) {
            adt_status st = adt_design_load_csv(design_path.c_str(), &d.d);
            if (st != ADT_OK) return fail(st);
        }
        StringGuard csv;
        adt_status st = adt_simulate(sc.s, d.d, n_units, seed, &csv.s);
        if (st != ADT_OK) return fail(st);
        write_file(fs::path(out_dir) / "observations.csv", csv.s);
        return 0;
    }

    return 2;
}
