#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "adt/design.hpp"
#include "adt/model.hpp"
#include "adt/model_core.hpp"

namespace adt {

// Deterministic standard-normal stream: mt19937_64 plus explicit Box-Muller,
// so sequences are identical across standard libraries.
class NormalSampler {
public:
    NormalSampler(std::uint64_t base_seed, std::uint64_t stream);
    double next();

private:
    std::mt19937_64 eng_;
};

// A realizable experiment: distinct stress settings with unit counts and a
// shared measurement time plan.
struct ExactDesign {
    std::vector<VectorXd> settings;
    std::vector<long> counts;
    std::vector<double> time_plan;

    long n_units() const;
    std::vector<VectorXd> expand() const;  // one entry per unit
};

ExactDesign make_exact(const ApproximateDesign& xi, long n_units,
                       std::vector<double> time_plan);

struct SimulationSpec {
    Scenario scenario;
    ExactDesign design;
    long replications = 1;
    std::uint64_t base_seed = 1;
};

// Hierarchical draws y_ij = f(x_i,t_j)'beta + f2(t_j)'gamma_i + eps_ij.
// Replication r uses an independent substream of base_seed; output is one
// n x k matrix per replication.
MatrixXd simulate_one(const SimulationSpec& spec, long rep);
std::vector<MatrixXd> simulate_paths(const SimulationSpec& spec);

struct FitOptions {
    long budget = 2000;   // likelihood evaluations for the variance search
    double tol = 1e-10;
};

struct FitResult {
    VectorXd beta;
    VectorXd varsigma;         // in the parametrization's coordinates
    VarianceComponents varcomps;
    double loglik = 0.0;
    double loglik_init = 0.0;
    bool converged = false;
    long evaluations = 0;
};

// Profile maximum likelihood: beta is the closed-form GLS estimate at each
// variance iterate; the variance parameters are maximized by a bounded
// derivative-free search (log/tanh transformed Nelder-Mead).
FitResult fit_ml(const MatrixXd& y, const ProductModel& model,
                 const ExactDesign& design, const VcParametrization& init,
                 const FitOptions& opts = {});

struct ValidationReport {
    long n = 0;
    long reps = 0;
    double alpha = 0.5;
    std::uint64_t seed = 1;
    double t_alpha_true = 0.0;
    double avar_standardized = 0.0;   // predicted, per-unit scale
    double empirical_var = 0.0;       // across replications
    double n_times_empirical_var = 0.0;
    double ratio = 0.0;               // n*Var / aVar
    double ci_lo = 0.0, ci_hi = 0.0;  // Monte Carlo interval for the ratio
    double mean_t_hat = 0.0;
    long degenerate = 0;
    double degenerate_rate = 0.0;
    bool reliable = true;             // degenerate rate at or below 1%
    std::vector<double> t_hats;       // per-replication estimates (NaN if degenerate)
};

// Simulates, refits, and compares the empirical variance of the quantile
// estimate against its asymptotic prediction.
ValidationReport validate_avar(const SimulationSpec& spec, double alpha);

}  // namespace adt
