#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace adt {

using Eigen::VectorXd;

// A vector of known regression functions over one covariate group, together
// with its admissible (standardized) region. Evaluation is permitted outside
// the region so that extrapolation targets such as normal-use conditions can
// be handled; region membership is checked by the operations that require it.
class Basis {
public:
    using Fn = std::function<double(const VectorXd&)>;

    enum class Kind { SimpleLinear, AdditiveLinear, Custom };

    // (1, x) on [lo, hi], one covariate.
    static Basis simple_linear(double lo = 0.0, double hi = 1.0);

    // (1, x1, ..., xd) on [lo, hi]^d.
    static Basis additive_linear(int factors, double lo = 0.0, double hi = 1.0);

    // Arbitrary functions; derivatives optional (finite differences are used
    // for single-covariate bases when dfns is empty).
    static Basis custom(int arity, std::vector<Fn> fns, std::vector<Fn> dfns,
                        VectorXd lower, VectorXd upper, bool has_intercept);

    int arity() const { return arity_; }
    int dimension() const { return static_cast<int>(fns_.size()); }
    bool has_intercept() const { return has_intercept_; }
    Kind kind() const { return kind_; }
    const VectorXd& lower() const { return lower_; }
    const VectorXd& upper() const { return upper_; }

    bool contains(const VectorXd& x, double tol = 1e-9) const;
    bool contains1(double x, double tol = 1e-9) const;

    VectorXd eval(const VectorXd& x) const;
    VectorXd eval1(double x) const;    // arity-1 convenience
    VectorXd deriv1(double x) const;   // d/dx of each function, arity-1 only

private:
    Basis() = default;

    Kind kind_ = Kind::Custom;
    int arity_ = 0;
    bool has_intercept_ = false;
    std::vector<Fn> fns_;
    std::vector<Fn> dfns_;
    VectorXd lower_, upper_;
};

}  // namespace adt
