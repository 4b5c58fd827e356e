#include "adt/basis.hpp"

#include <cmath>

#include "adt/errors.hpp"

namespace adt {

Basis Basis::simple_linear(double lo, double hi) {
    if (!(lo < hi)) throw DomainError("Basis: region bounds must satisfy lo < hi");
    Basis b;
    b.kind_ = Kind::SimpleLinear;
    b.arity_ = 1;
    b.has_intercept_ = true;
    b.fns_ = {[](const VectorXd&) { return 1.0; },
              [](const VectorXd& x) { return x(0); }};
    b.dfns_ = {[](const VectorXd&) { return 0.0; },
               [](const VectorXd&) { return 1.0; }};
    b.lower_ = VectorXd::Constant(1, lo);
    b.upper_ = VectorXd::Constant(1, hi);
    return b;
}

Basis Basis::additive_linear(int factors, double lo, double hi) {
    if (factors < 1) throw DomainError("Basis: additive basis needs at least one factor");
    if (!(lo < hi)) throw DomainError("Basis: region bounds must satisfy lo < hi");
    Basis b;
    b.kind_ = Kind::AdditiveLinear;
    b.arity_ = factors;
    b.has_intercept_ = true;
    b.fns_.push_back([](const VectorXd&) { return 1.0; });
    for (int j = 0; j < factors; ++j)
        b.fns_.push_back([j](const VectorXd& x) { return x(j); });
    b.lower_ = VectorXd::Constant(factors, lo);
    b.upper_ = VectorXd::Constant(factors, hi);
    return b;
}

Basis Basis::custom(int arity, std::vector<Fn> fns, std::vector<Fn> dfns,
                    VectorXd lower, VectorXd upper, bool has_intercept) {
    if (fns.empty()) throw DomainError("Basis: needs at least one function");
    if (lower.size() != arity || upper.size() != arity)
        throw DomainError("Basis: region bounds must match the covariate arity");
    if (!dfns.empty() && dfns.size() != fns.size())
        throw DomainError("Basis: derivative list must match the function list");
    Basis b;
    b.kind_ = Kind::Custom;
    b.arity_ = arity;
    b.has_intercept_ = has_intercept;
    b.fns_ = std::move(fns);
    b.dfns_ = std::move(dfns);
    b.lower_ = std::move(lower);
    b.upper_ = std::move(upper);
    return b;
}

bool Basis::contains(const VectorXd& x, double tol) const {
    if (x.size() != arity_) return false;
    for (int j = 0; j < arity_; ++j)
        if (x(j) < lower_(j) - tol || x(j) > upper_(j) + tol) return false;
    return true;
}

bool Basis::contains1(double x, double tol) const {
    return contains(VectorXd::Constant(1, x), tol);
}

VectorXd Basis::eval(const VectorXd& x) const {
    if (x.size() != arity_)
        throw DomainError("Basis: covariate dimension mismatch");
    VectorXd out(dimension());
    for (int j = 0; j < dimension(); ++j) {
        out(j) = fns_[j](x);
        if (!std::isfinite(out(j)))
            throw DomainError("Basis: regression function evaluated non-finite");
    }
    return out;
}

VectorXd Basis::eval1(double x) const {
    return eval(VectorXd::Constant(1, x));
}

VectorXd Basis::deriv1(double x) const {
    if (arity_ != 1) throw DomainError("Basis: derivatives only for single-covariate bases");
    VectorXd out(dimension());
    if (!dfns_.empty()) {
        VectorXd xv = VectorXd::Constant(1, x);
        for (int j = 0; j < dimension(); ++j) out(j) = dfns_[j](xv);
        return out;
    }
    // Central differences for custom bases without analytic derivatives.
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    out = (eval1(x + h) - eval1(x - h)) / (2.0 * h);
    return out;
}

}  // namespace adt
