#pragma once

#include <string>
#include <vector>

#include "adt/design.hpp"
#include "adt/estimation.hpp"
#include "adt/failure_time.hpp"
#include "adt/model.hpp"

namespace adt {

// Scenario files are JSON documents mirroring the nominal-value tables:
// model bases by kind, lexicographically ordered beta, variance components,
// use condition, threshold, alpha, optional regions / time plan / time grid.
// Unknown keys are rejected.
Scenario parse_scenario_json(const std::string& text);
Scenario load_scenario(const std::string& path);

// Rounds to 12 significant digits; all serialized numerics pass through this.
double round_sig(double v, int digits = 12);
std::string format_sig(double v, int digits = 12);

std::string design_to_csv(const ApproximateDesign& d,
                          const std::vector<std::string>& labels);
ApproximateDesign design_from_csv(const std::string& text);

std::string design_report_to_json(const DesignReport& rep);

struct FailureTimeSummary {
    double alpha = 0.5;
    QuantileResult quantile;
    VectorXd delta;
    double median = 0.0;
    double h0 = 0.0;
    double h_limit = 0.0;
    double alpha_max = 0.0;
};

FailureTimeSummary failure_time_summary(const Scenario& scenario, double alpha);
std::string failure_time_summary_json(const FailureTimeSummary& s);

// (t, h(t), F_T(t)) over an equidistant grid.
std::string failure_time_curve_csv(const Scenario& scenario, double t_max, int points);

std::string validation_report_json(const ValidationReport& rep);
std::string validation_replicates_csv(const ValidationReport& rep);

std::string observations_csv(const MatrixXd& y, const ExactDesign& design);

std::string profile_csv(const std::vector<double>& grid,
                        const std::vector<double>& weights);

}  // namespace adt
