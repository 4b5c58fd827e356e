#include "adt/adt.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "adt/destructive.hpp"
#include "adt/linalg.hpp"
#include "adt/errors.hpp"
#include "adt/estimation.hpp"
#include "adt/failure_time.hpp"
#include "adt/scenario_io.hpp"
#include "adt/stress_design.hpp"
#include "adt/time_design.hpp"

struct adt_scenario {
    adt::Scenario value;
};

struct adt_design {
    adt::ApproximateDesign value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
adt_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const adt::DegenerateError& e) {
        g_last_error = e.what();
        return ADT_ERR_DEGENERATE;
    } catch (const adt::SingularError& e) {
        g_last_error = e.what();
        return ADT_ERR_SINGULAR;
    } catch (const adt::DomainError& e) {
        g_last_error = e.what();
        return ADT_ERR_INPUT;
    } catch (const adt::Error& e) {
        g_last_error = e.what();
        return ADT_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ADT_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* adt_version(void) { return "1.0.0"; }

const char* adt_last_error(void) { return g_last_error.c_str(); }

void adt_string_free(char* s) { std::free(s); }

adt_status adt_scenario_parse(const char* json_text, adt_scenario** out) {
    if (!json_text || !out) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        *out = new adt_scenario{adt::parse_scenario_json(json_text)};
        return ADT_OK;
    });
}

adt_status adt_scenario_load(const char* path, adt_scenario** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        *out = new adt_scenario{adt::load_scenario(path)};
        return ADT_OK;
    });
}

void adt_scenario_free(adt_scenario* s) { delete s; }

adt_status adt_design_parse_csv(const char* csv_text, adt_design** out) {
    if (!csv_text || !out) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        *out = new adt_design{adt::design_from_csv(csv_text)};
        return ADT_OK;
    });
}

adt_status adt_design_load_csv(const char* path, adt_design** out) {
    if (!path || !out) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        std::ifstream in(path);
        if (!in) throw adt::DomainError(std::string("cannot open design file '") + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        *out = new adt_design{adt::design_from_csv(ss.str())};
        return ADT_OK;
    });
}

adt_status adt_design_csv(const adt_design* d, char** csv_out) {
    if (!d || !csv_out) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        *csv_out = dup_string(adt::design_to_csv(d->value, {}));
        return ADT_OK;
    });
}

void adt_design_free(adt_design* d) { delete d; }

adt_status adt_failure_time(const adt_scenario* s, double alpha, char** report_json) {
    if (!s || !report_json) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        const double a = alpha > 0.0 ? alpha : s->value.alpha;
        adt::FailureTimeSummary sum = adt::failure_time_summary(s->value, a);
        *report_json = dup_string(adt::failure_time_summary_json(sum));
        if (!sum.quantile.ok()) {
            g_last_error = "quantile is degenerate at alpha=" + std::to_string(a);
            return ADT_ERR_DEGENERATE;
        }
        return ADT_OK;
    });
}

adt_status adt_failure_time_curve(const adt_scenario* s, double t_max, int points,
                                  char** csv_out) {
    if (!s || !csv_out) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        adt::FailureTimeSummary sum = adt::failure_time_summary(s->value, s->value.alpha);
        double tm = t_max;
        if (tm <= 0.0) tm = sum.quantile.ok() ? 2.0 * sum.quantile.t : 2.0;
        *csv_out = dup_string(
            adt::failure_time_curve_csv(s->value, tm, points > 1 ? points : 201));
        return ADT_OK;
    });
}

adt_status adt_design_stress(const adt_scenario* s, int grid_points,
                             int with_benchmarks, adt_design** design_out,
                             char** report_json) {
    if (!s) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        adt::DesignReport rep = adt::optimal_stress_for_quantile(
            s->value, grid_points > 1 ? grid_points : 101, with_benchmarks != 0);
        if (design_out) *design_out = new adt_design{rep.design};
        if (report_json) *report_json = dup_string(adt::design_report_to_json(rep));
        return ADT_OK;
    });
}

adt_status adt_design_time(const adt_scenario* s, double delta, int k, long max_iter,
                           double tol, adt_design** tau_out, adt_design** tau0_out,
                           char** report_json, char** profile_csv_out) {
    if (!s) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        double d = delta > 0.0 ? delta : s->value.time_grid.delta;
        int kk = k > 0 ? k : s->value.time_grid.k;
        adt::TimeGrid grid = adt::TimeGrid::make(d, kk);
        adt::TimePlanOptions opts;
        if (max_iter > 0) opts.max_iter = max_iter;
        if (tol > 0.0) opts.tol = tol;
        adt::TimePlanResult res = adt::optimal_time_plan(s->value, grid, opts);
        auto tau0_times = adt::adjust_to_exact_plan(res.tau, grid);
        std::vector<double> w0(tau0_times.size(), 1.0 / grid.k);
        adt::ApproximateDesign tau0 = adt::ApproximateDesign::make1d(tau0_times, w0);

        adt::DesignReport rep = res.report;
        rep.benchmarks["adjusted_exact_plan_efficiency"] =
            adt::time_plan_efficiency(tau0, res.tau, s->value, grid.k);

        if (tau_out) *tau_out = new adt_design{res.tau};
        if (tau0_out) *tau0_out = new adt_design{tau0};
        if (report_json) *report_json = dup_string(adt::design_report_to_json(rep));
        if (profile_csv_out)
            *profile_csv_out = dup_string(adt::profile_csv(grid.points, res.profile));
        return ADT_OK;
    });
}

adt_status adt_design_destructive(const adt_scenario* s, int grid_points,
                                  adt_design** design_out, char** report_json) {
    if (!s) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        adt::DestructiveResult res = adt::destructive_optimal_design(
            s->value, grid_points > 1 ? grid_points : 101);
        if (design_out) *design_out = new adt_design{res.zeta};
        if (report_json) *report_json = dup_string(adt::design_report_to_json(res.report));
        return ADT_OK;
    });
}

adt_status adt_sensitivity(const adt_scenario* s, int points, char** t_half_csv_out,
                           char** ratio_csv_out) {
    if (!s) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        adt::SensitivityOptions opts;
        if (points > 1) opts.points = points;
        auto curves = adt::sensitivity_curves(s->value, opts);
        for (const auto& c : curves) {
            std::ostringstream out;
            out << "probe_value,eff_optimal,eff_uniform2,eff_uniform6\n";
            for (const auto& row : c.rows) {
                out << adt::format_sig(row[0]) << "," << adt::format_sig(row[1]) << ","
                    << adt::format_sig(row[2]) << "," << adt::format_sig(row[3]) << "\n";
            }
            if (c.axis == "t_half" && t_half_csv_out)
                *t_half_csv_out = dup_string(out.str());
            if (c.axis == "sigma_ratio" && ratio_csv_out)
                *ratio_csv_out = dup_string(out.str());
        }
        return ADT_OK;
    });
}

adt_status adt_efficiency(const adt_scenario* s, const adt_design* d,
                          const char* family, int k, char** report_json) {
    if (!s || !d || !family || !report_json) {
        g_last_error = "null argument";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        const adt::Scenario& sc = s->value;
        const std::string fam = family;
        adt::DesignReport rep;
        rep.design = d->value;
        rep.family = fam;
        if (fam == "stress") {
            adt::UseConditionProfile prof = adt::use_profile(sc);
            adt::DesignReport opt = adt::optimal_stress_for_quantile(sc);
            adt::CValue cv = adt::c_criterion(d->value, sc.model, prof.f1_xu);
            rep.criterion = cv.value;
            rep.optimum_criterion = opt.criterion;
            rep.efficiency = cv.feasible ? opt.criterion / cv.value : 0.0;
            rep.full_model_estimable =
                adt::linalg::symmetric_rank(adt::stress_info(d->value, sc.model)) ==
                sc.model.p1();
            rep.certificate_gap = cv.feasible
                ? adt::verify_c_optimality(
                      d->value, [&](const Eigen::VectorXd& x) { return sc.model.f1(x); },
                      adt::stress_grid(sc.model, sc.model.stress_arity() > 2 ? 21 : 101),
                      prof.f1_xu)
                : std::numeric_limits<double>::infinity();
            if (!cv.feasible) rep.notes = "design infeasible for the extrapolation target";
        } else if (fam == "time") {
            int kk = k > 0 ? k : sc.time_grid.k;
            adt::TimeGrid grid = adt::TimeGrid::make(sc.time_grid.delta, kk);
            adt::TimePlanResult opt = adt::optimal_time_plan(sc, grid);
            rep.criterion = adt::mixed_time_criterion(
                d->value, sc, kk, sc.model.time_basis().eval1(opt.t_half));
            rep.optimum_criterion = adt::mixed_time_criterion(
                opt.tau, sc, kk, sc.model.time_basis().eval1(opt.t_half));
            rep.efficiency = adt::time_plan_efficiency(d->value, opt.tau, sc, kk);
            rep.certificate_gap = opt.report.certificate_gap;
        } else if (fam == "destructive") {
            adt::DestructiveResult opt = adt::destructive_optimal_design(sc);
            adt::UseConditionProfile prof = adt::use_profile(sc);
            adt::QuantileResult med = adt::quantile(prof, 0.5);
            adt::WeightedTimeModel wm = adt::weighted_time_model(sc);
            const int dstress = sc.model.stress_arity();
            auto feval = [&](const Eigen::VectorXd& xt) {
                return adt::linalg::kron(sc.model.f1(xt.head(dstress)),
                                         wm.weighted_basis(xt(dstress)));
            };
            const Eigen::VectorXd c = adt::linalg::kron(
                prof.f1_xu, sc.model.time_basis().eval1(med.t));
            adt::CValue cv = adt::c_criterion_info(adt::design_info(d->value, feval), c);
            rep.criterion = cv.value;
            rep.optimum_criterion = opt.report.criterion;
            rep.efficiency = cv.feasible ? opt.report.criterion / cv.value : 0.0;
        } else {
            throw adt::DomainError("efficiency: family must be stress, time or destructive");
        }
        *report_json = dup_string(adt::design_report_to_json(rep));
        return ADT_OK;
    });
}

namespace {

adt::SimulationSpec build_spec(const adt::Scenario& sc, const adt_design* design,
                               long n_units, long reps, uint64_t seed) {
    adt::ApproximateDesign xi =
        design ? design->value : adt::optimal_stress_for_quantile(sc).design;
    if (xi.dim() != sc.model.stress_arity())
        throw adt::DomainError("design dimension does not match the scenario's stress arity");
    adt::SimulationSpec spec{sc, adt::make_exact(xi, n_units, sc.time_plan), reps, seed};
    if (spec.design.time_plan.empty())
        throw adt::DomainError("scenario has no time_plan for simulation");
    return spec;
}

}  // namespace

adt_status adt_validate(const adt_scenario* s, const adt_design* design, long n_units,
                        long replications, uint64_t seed, double alpha,
                        char** report_json, char** replicates_csv_out) {
    if (!s || n_units < 1 || replications < 1) {
        g_last_error = "invalid arguments";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        const double a = alpha > 0.0 ? alpha : s->value.alpha;
        adt::SimulationSpec spec = build_spec(s->value, design, n_units, replications, seed);
        adt::ValidationReport rep = adt::validate_avar(spec, a);
        if (report_json) *report_json = dup_string(adt::validation_report_json(rep));
        if (replicates_csv_out)
            *replicates_csv_out = dup_string(adt::validation_replicates_csv(rep));
        if (!rep.reliable) {
            g_last_error = "degenerate-rate above 1%; asymptotics unreliable at this n";
            return ADT_ERR_VALIDATION;
        }
        return ADT_OK;
    });
}

adt_status adt_simulate(const adt_scenario* s, const adt_design* design, long n_units,
                        uint64_t seed, char** observations_csv) {
    if (!s || !observations_csv || n_units < 1) {
        g_last_error = "invalid arguments";
        return ADT_ERR_INPUT;
    }
    return guarded([&] {
        adt::SimulationSpec spec = build_spec(s->value, design, n_units, 1, seed);
        Eigen::MatrixXd y = adt::simulate_one(spec, 0);
        *observations_csv = dup_string(adt::observations_csv(y, spec.design));
        return ADT_OK;
    });
}

}  // extern "C"
