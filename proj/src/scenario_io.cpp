#include "adt/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adt/errors.hpp"

namespace adt {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw DomainError("scenario: unknown key '" + it.key() + "' in " + where);
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw DomainError("scenario: missing or non-numeric '" + key + "' in " + where);
    return obj[key].get<double>();
}

std::pair<double, double> region_bounds(const json& model, const std::string& key,
                                        double def_lo, double def_hi) {
    if (!model.contains(key)) return {def_lo, def_hi};
    const json& r = model.at(key);
    reject_unknown_keys(r, {"lower", "upper"}, key);
    return {get_number(r, "lower", key), get_number(r, "upper", key)};
}

Basis parse_stress_basis(const json& spec, double lo, double hi) {
    reject_unknown_keys(spec, {"kind", "factors"}, "model.stress_bases[]");
    const std::string kind = spec.value("kind", "");
    const int factors = spec.value("factors", 1);
    if (kind == "linear-with-intercept") {
        if (factors != 1)
            throw DomainError("scenario: linear-with-intercept basis takes one factor");
        return Basis::simple_linear(lo, hi);
    }
    if (kind == "additive-linear") return Basis::additive_linear(factors, lo, hi);
    throw DomainError("scenario: unknown stress basis kind '" + kind + "'");
}

}  // namespace

namespace {
Scenario parse_scenario_checked(const json& doc);
}

Scenario parse_scenario_json(const std::string& text) {
    try {
        return parse_scenario_checked(json::parse(text));
    } catch (const json::exception& e) {
        throw DomainError(std::string("scenario: JSON error: ") + e.what());
    }
}

namespace {

Scenario parse_scenario_checked(const json& doc) {
    reject_unknown_keys(doc,
                        {"model", "beta", "variance", "use_condition", "threshold",
                         "alpha", "time_plan", "time_grid"},
                        "top level");
    if (!doc.contains("model")) throw DomainError("scenario: missing 'model'");
    const json& jm = doc["model"];
    reject_unknown_keys(jm, {"stress_bases", "time_basis", "stress_region", "time_region"},
                        "model");

    auto [slo, shi] = region_bounds(jm, "stress_region", 0.0, 1.0);
    auto [tlo, thi] = region_bounds(jm, "time_region", 0.0, 1.0);

    if (!jm.contains("stress_bases") || !jm["stress_bases"].is_array() ||
        jm["stress_bases"].empty())
        throw DomainError("scenario: model.stress_bases must be a non-empty array");
    std::vector<Basis> stress;
    for (const auto& b : jm["stress_bases"]) stress.push_back(parse_stress_basis(b, slo, shi));

    if (!jm.contains("time_basis"))
        throw DomainError("scenario: missing model.time_basis");
    reject_unknown_keys(jm["time_basis"], {"kind"}, "model.time_basis");
    if (jm["time_basis"].value("kind", "") != "linear-with-intercept")
        throw DomainError("scenario: unknown time basis kind");
    Basis time_basis = Basis::simple_linear(tlo, thi);

    ProductModel model(std::move(stress), std::move(time_basis));

    if (!doc.contains("beta") || !doc["beta"].is_array())
        throw DomainError("scenario: 'beta' must be an array");
    VectorXd beta(doc["beta"].size());
    for (size_t i = 0; i < doc["beta"].size(); ++i) beta(i) = doc["beta"][i].get<double>();

    if (!doc.contains("variance")) throw DomainError("scenario: missing 'variance'");
    const json& jv = doc["variance"];
    VarianceComponents vc;
    if (jv.contains("sigma_gamma")) {
        reject_unknown_keys(jv, {"sigma_gamma", "sigma_eps", "rho_eps"}, "variance");
        const auto& sg = jv["sigma_gamma"];
        const int p2 = static_cast<int>(sg.size());
        vc.sigma_gamma.resize(p2, p2);
        for (int i = 0; i < p2; ++i)
            for (int j = 0; j < p2; ++j) vc.sigma_gamma(i, j) = sg[i][j].get<double>();
        const double se = get_number(jv, "sigma_eps", "variance");
        vc.sigma_eps = jv.contains("rho_eps")
                           ? ErrorCov::compound_symmetry(se, jv["rho_eps"].get<double>())
                           : ErrorCov::scalar(se);
    } else {
        reject_unknown_keys(jv, {"sigma1", "sigma2", "rho", "sigma_eps", "rho_eps"},
                            "variance");
        vc = VarianceComponents::from_sigmas(
            get_number(jv, "sigma1", "variance"), get_number(jv, "sigma2", "variance"),
            jv.value("rho", 0.0), get_number(jv, "sigma_eps", "variance"));
        if (jv.contains("rho_eps"))
            vc.sigma_eps = ErrorCov::compound_symmetry(get_number(jv, "sigma_eps", "variance"),
                                                       jv["rho_eps"].get<double>());
    }

    if (!doc.contains("use_condition") || !doc["use_condition"].is_array())
        throw DomainError("scenario: 'use_condition' must be an array");
    VectorXd xu(doc["use_condition"].size());
    for (size_t i = 0; i < doc["use_condition"].size(); ++i)
        xu(i) = doc["use_condition"][i].get<double>();

    Scenario sc{std::move(model), std::move(beta), std::move(vc), std::move(xu),
                get_number(doc, "threshold", "top level"), doc.value("alpha", 0.5),
                {}, {}};

    if (doc.contains("time_plan")) {
        for (const auto& t : doc["time_plan"]) sc.time_plan.push_back(t.get<double>());
    }
    if (doc.contains("time_grid")) {
        const json& tg = doc["time_grid"];
        reject_unknown_keys(tg, {"delta", "k"}, "time_grid");
        sc.time_grid.delta = get_number(tg, "delta", "time_grid");
        sc.time_grid.k = static_cast<int>(get_number(tg, "k", "time_grid"));
        sc.time_grid.present = true;
    }
    sc.validate();
    return sc;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("scenario: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str());
}

double round_sig(double v, int digits) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

std::string design_to_csv(const ApproximateDesign& d,
                          const std::vector<std::string>& labels) {
    std::ostringstream out;
    std::vector<std::string> cols = labels;
    if (cols.empty())
        for (int j = 0; j < d.dim(); ++j) cols.push_back("x" + std::to_string(j + 1));
    if (static_cast<int>(cols.size()) != d.dim())
        throw DomainError("design_to_csv: label count must match point dimension");
    for (const auto& c : cols) out << c << ",";
    out << "weight\n";
    for (int i = 0; i < d.size(); ++i) {
        for (int j = 0; j < d.dim(); ++j) out << format_sig(d.support[i](j)) << ",";
        out << format_sig(d.weights(i)) << "\n";
    }
    return out.str();
}

ApproximateDesign design_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw DomainError("design_from_csv: empty document");
    std::vector<VectorXd> pts;
    std::vector<double> w;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<double> vals;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (...) {
                throw DomainError("design_from_csv: non-numeric cell '" + cell + "'");
            }
        }
        if (vals.size() < 2)
            throw DomainError("design_from_csv: rows need coordinates and a weight");
        VectorXd p(vals.size() - 1);
        for (size_t j = 0; j + 1 < vals.size(); ++j) p(j) = vals[j];
        pts.push_back(p);
        w.push_back(vals.back());
    }
    if (pts.empty()) throw DomainError("design_from_csv: no data rows");
    VectorXd wv = Eigen::Map<const VectorXd>(w.data(), w.size());
    // Tolerate serialization round-off in the weight sum.
    const double s = wv.sum();
    if (std::abs(s - 1.0) > 1e-6)
        throw DomainError("design_from_csv: weights must sum to 1");
    wv /= s;
    return ApproximateDesign::make(std::move(pts), wv);
}

namespace {

ordered_json design_json(const ApproximateDesign& d) {
    ordered_json jd;
    jd["points"] = ordered_json::array();
    for (const auto& p : d.support) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < p.size(); ++j) row.push_back(round_sig(p(j)));
        jd["points"].push_back(row);
    }
    jd["weights"] = ordered_json::array();
    for (Eigen::Index i = 0; i < d.weights.size(); ++i)
        jd["weights"].push_back(round_sig(d.weights(i)));
    return jd;
}

}  // namespace

std::string design_report_to_json(const DesignReport& rep) {
    ordered_json j;
    j["family"] = rep.family;
    j["design"] = design_json(rep.design);
    j["criterion"] = round_sig(rep.criterion);
    j["optimum_criterion"] = round_sig(rep.optimum_criterion);
    j["efficiency"] = round_sig(rep.efficiency);
    j["certificate_gap"] = round_sig(rep.certificate_gap);
    j["full_model_estimable"] = rep.full_model_estimable;
    j["alpha_independent"] = rep.alpha_independent;
    j["converged"] = rep.converged;
    if (rep.iterations > 0) j["iterations"] = rep.iterations;
    if (!rep.benchmarks.empty()) {
        ordered_json bm;
        for (const auto& [k, v] : rep.benchmarks) bm[k] = round_sig(v);
        j["benchmarks"] = bm;
    }
    if (!rep.notes.empty()) j["notes"] = rep.notes;
    return j.dump(2) + "\n";
}

FailureTimeSummary failure_time_summary(const Scenario& scenario, double alpha) {
    UseConditionProfile prof = use_profile(scenario);
    FailureTimeSummary s;
    s.alpha = alpha;
    s.delta = prof.delta;
    s.quantile = quantile(prof, alpha);
    QuantileResult med = quantile(prof, 0.5);
    s.median = med.ok() ? med.t : std::numeric_limits<double>::quiet_NaN();
    s.h0 = prof.h(0.0);
    s.h_limit = prof.h_limit();
    s.alpha_max = prof.alpha_max();
    return s;
}

std::string failure_time_summary_json(const FailureTimeSummary& s) {
    ordered_json j;
    j["alpha"] = round_sig(s.alpha);
    j["delta"] = ordered_json::array();
    for (Eigen::Index i = 0; i < s.delta.size(); ++i)
        j["delta"].push_back(round_sig(s.delta(i)));
    switch (s.quantile.status) {
        case QuantileStatus::Ok: j["status"] = "ok"; break;
        case QuantileStatus::AtZero: j["status"] = "at-zero"; break;
        case QuantileStatus::Infinite: j["status"] = "infinite"; break;
    }
    if (s.quantile.ok()) {
        j["t_alpha"] = round_sig(s.quantile.t);
        j["c0"] = round_sig(s.quantile.c0);
    }
    j["median"] = round_sig(s.median);
    j["h0"] = round_sig(s.h0);
    j["h_limit"] = round_sig(s.h_limit);
    j["alpha_max"] = round_sig(s.alpha_max);
    return j.dump(2) + "\n";
}

std::string failure_time_curve_csv(const Scenario& scenario, double t_max, int points) {
    if (points < 2) throw DomainError("failure_time_curve_csv: need at least 2 points");
    UseConditionProfile prof = use_profile(scenario);
    std::ostringstream out;
    out << "t,h,F\n";
    for (int i = 0; i < points; ++i) {
        const double t = t_max * i / (points - 1.0);
        out << format_sig(t) << "," << format_sig(prof.h(t)) << ","
            << format_sig(prof.failure_cdf(t)) << "\n";
    }
    return out.str();
}

std::string validation_report_json(const ValidationReport& rep) {
    ordered_json j;
    j["n"] = rep.n;
    j["replications"] = rep.reps;
    j["alpha"] = round_sig(rep.alpha);
    j["seed"] = rep.seed;
    j["t_alpha_true"] = round_sig(rep.t_alpha_true);
    j["avar_standardized"] = round_sig(rep.avar_standardized);
    j["empirical_variance"] = round_sig(rep.empirical_var);
    j["n_times_empirical_variance"] = round_sig(rep.n_times_empirical_var);
    j["ratio"] = round_sig(rep.ratio);
    j["ratio_ci"] = {round_sig(rep.ci_lo), round_sig(rep.ci_hi)};
    j["mean_t_hat"] = round_sig(rep.mean_t_hat);
    j["degenerate_count"] = rep.degenerate;
    j["degenerate_rate"] = round_sig(rep.degenerate_rate);
    j["reliable"] = rep.reliable;
    if (rep.reps < 2) j["warning"] = "variance undefined with fewer than 2 replications";
    return j.dump(2) + "\n";
}

std::string validation_replicates_csv(const ValidationReport& rep) {
    std::ostringstream out;
    out << "replication,t_hat\n";
    for (size_t r = 0; r < rep.t_hats.size(); ++r) {
        out << r << ",";
        if (std::isnan(rep.t_hats[r])) out << "degenerate";
        else out << format_sig(rep.t_hats[r]);
        out << "\n";
    }
    return out.str();
}

std::string observations_csv(const MatrixXd& y, const ExactDesign& design) {
    std::ostringstream out;
    auto units = design.expand();
    const int d = units.empty() ? 0 : static_cast<int>(units[0].size());
    out << "unit";
    for (int j = 0; j < d; ++j) out << ",x" << (j + 1);
    for (size_t j = 0; j < design.time_plan.size(); ++j)
        out << ",t" << format_sig(design.time_plan[j]);
    out << "\n";
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        out << i;
        for (int j = 0; j < d; ++j) out << "," << format_sig(units[i](j));
        for (Eigen::Index j = 0; j < y.cols(); ++j) out << "," << format_sig(y(i, j));
        out << "\n";
    }
    return out.str();
}

std::string profile_csv(const std::vector<double>& grid,
                        const std::vector<double>& weights) {
    if (grid.size() != weights.size())
        throw DomainError("profile_csv: grid and weights must match");
    std::ostringstream out;
    out << "t,weight\n";
    for (size_t i = 0; i < grid.size(); ++i)
        out << format_sig(grid[i]) << "," << format_sig(weights[i]) << "\n";
    return out.str();
}

}  // namespace adt
