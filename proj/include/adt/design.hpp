#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adt/model.hpp"

namespace adt {

// Finite-support probability measure over experimental settings. Support
// points closer than 1e-9 in the infinity norm are merged with summed
// weights; weights must be positive and sum to one within 1e-12.
struct ApproximateDesign {
    std::vector<VectorXd> support;
    VectorXd weights;

    static ApproximateDesign make(std::vector<VectorXd> points, VectorXd weights);
    static ApproximateDesign make1d(const std::vector<double>& points,
                                    const std::vector<double>& weights);

    int size() const { return static_cast<int>(support.size()); }
    int dim() const { return support.empty() ? 0 : static_cast<int>(support[0].size()); }
    void validate() const;
};

using FeatureMap = std::function<VectorXd(const VectorXd&)>;

// Standardized per-unit information matrix sum_i w_i f(x_i) f(x_i)'.
MatrixXd design_info(const ApproximateDesign& xi, const FeatureMap& f);

// Information matrix in the marginal stress model; support must lie in the
// stress region.
MatrixXd stress_info(const ApproximateDesign& xi, const ProductModel& model);

struct CValue {
    double value = 0.0;    // c' M^- c, +inf when infeasible
    bool feasible = true;  // c in range(M)
};

// c-criterion via generalized inverse with a range-space feasibility check.
CValue c_criterion_info(const MatrixXd& M, const VectorXd& c);
CValue c_criterion(const ApproximateDesign& xi, const ProductModel& model,
                   const VectorXd& c);

// Cartesian product with multiplied weights.
ApproximateDesign product_design(const ApproximateDesign& a, const ApproximateDesign& b);

struct EfficiencyValue {
    double value = 0.0;
    bool feasible = true;
};

// Ratio of c-criterion values optimum/candidate in the marginal stress model.
EfficiencyValue efficiency(const ApproximateDesign& candidate,
                           const ApproximateDesign& optimum,
                           const ProductModel& model, const VectorXd& c);

// Equal weights 1/m on the equidistant m-point grid over [lo, hi].
ApproximateDesign uniform_grid_design(int m, double lo = 0.0, double hi = 1.0);

// Closed forms for extrapolation at x_u <= 0 in the simple linear model on
// [0,1]: optimal criterion (1+2|x_u|)^2, uniform-grid criterion
// 1 + a_m (1+2|x_u|)^2 with a_m = 3(m-1)/(m+1), and their ratio. m == 0 is
// accepted as the continuous-uniform limit a = 3.
double phi_c_optimal_extrapolation(double xu);
double phi_c_uniform_grid(int m, double xu);
double eff_uniform_grid(int m, double xu);

// Largest-remainder apportionment of n units to the design weights.
std::vector<long> round_to_exact(const ApproximateDesign& xi, long n_units);

// Optimization outcome plus certification and benchmark diagnostics.
struct DesignReport {
    ApproximateDesign design;
    std::string family;             // "stress" | "time" | "destructive"
    double criterion = 0.0;         // c' M^- c of the design
    double optimum_criterion = 0.0; // certified or closed-form optimum
    double efficiency = 1.0;
    double certificate_gap = 0.0;   // max equivalence-theorem violation
    std::map<std::string, double> benchmarks;
    bool full_model_estimable = true;
    bool alpha_independent = false;
    bool converged = true;
    long iterations = 0;
    std::string notes;
    std::vector<double> grid_points;   // time-design weight profile (optional)
    std::vector<double> grid_profile;
};

}  // namespace adt
