#pragma once

#include <Eigen/Dense>
#include <vector>

#include "adt/design.hpp"
#include "adt/model.hpp"

namespace adt {

// Closed-form c-optimal design for extrapolation at x_u <= 0 in the simple
// linear model on [0,1]: weight |x_u|/(1+2|x_u|) at 1, the rest at 0.
ApproximateDesign extrapolation_two_point(double xu);

// Mirror image for extrapolation at a target >= 1 (used for time marginals):
// weight target/(2*target-1) at 1, the rest at 0.
ApproximateDesign extrapolation_two_point_above(double target);

struct ElfvingSolution {
    double lambda = 0.0;         // boundary scaling of the ray through c
    ApproximateDesign design;
    std::vector<int> signs;      // +1 from the induced region, -1 from its mirror
    double criterion = 0.0;      // 1 / lambda^2
};

// Geometric c-optimal design construction as a linear program over the
// candidate grid: maximize lambda subject to lambda*c lying in the convex
// hull of {+/- f(x_i)}.
ElfvingSolution elfving_solve(const FeatureMap& f, const std::vector<VectorXd>& grid,
                              const VectorXd& c);

// Dual equivalence check: max over the grid of (f(x)' M^- c)^2 / (c' M^- c)
// minus one; values <= 1e-6 certify c-optimality.
double verify_c_optimality(const ApproximateDesign& design, const FeatureMap& f,
                           const std::vector<VectorXd>& grid, const VectorXd& c);

// Family of c-optimal designs for the additive two-factor model
// f1(x) = (1, x1, x2) on [0,1]^2 at x_u = (xu1, xu2), xu1, xu2 < 0,
// parametrized by the mixing coefficient a in [0,1].
ApproximateDesign additive_family(double xu1, double xu2, double a);

// Optimal stress design for quantile estimation with a predetermined time
// plan: the c-optimal extrapolation design at f1(x_u), built per factor
// group and combined as a product design. The same design is optimal for
// every alpha with a finite positive quantile.
DesignReport optimal_stress_for_quantile(const Scenario& scenario,
                                         int grid_per_axis = 101,
                                         bool with_benchmarks = false);

// Equidistant cartesian grid over a box.
std::vector<VectorXd> make_grid(const VectorXd& lower, const VectorXd& upper,
                                int per_axis);

// Candidate grid over a model's combined stress region.
std::vector<VectorXd> stress_grid(const ProductModel& model, int per_axis);

// Uniform design on the vertices of the stress region box.
ApproximateDesign vertex_uniform_design(const ProductModel& model);

}  // namespace adt
