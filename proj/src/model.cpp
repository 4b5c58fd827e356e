#include "adt/model.hpp"

#include <cmath>

#include "adt/errors.hpp"
#include "adt/linalg.hpp"

namespace adt {

ErrorCov ErrorCov::scalar(double sigma_eps) {
    if (!(sigma_eps > 0.0) || !std::isfinite(sigma_eps))
        throw DomainError("ErrorCov: sigma_eps must be positive and finite");
    ErrorCov e;
    e.kind_ = Kind::Scalar;
    e.sigma_eps_ = sigma_eps;
    return e;
}

ErrorCov ErrorCov::compound_symmetry(double sigma_eps, double rho_eps) {
    if (!(sigma_eps > 0.0)) throw DomainError("ErrorCov: sigma_eps must be positive");
    if (!(rho_eps > -1.0 && rho_eps < 1.0))
        throw DomainError("ErrorCov: compound-symmetry correlation must lie in (-1,1)");
    ErrorCov e;
    e.kind_ = Kind::CompoundSymmetry;
    e.sigma_eps_ = sigma_eps;
    e.rho_eps_ = rho_eps;
    return e;
}

ErrorCov ErrorCov::dense(MatrixXd sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
        throw DomainError("ErrorCov: dense covariance must be square");
    if (!linalg::is_symmetric_psd(sigma))
        throw DomainError("ErrorCov: dense covariance must be symmetric PSD");
    ErrorCov e;
    e.kind_ = Kind::Dense;
    e.dense_ = std::move(sigma);
    e.sigma_eps_ = std::sqrt(e.dense_(0, 0));
    return e;
}

MatrixXd ErrorCov::materialize(int k) const {
    if (k < 1) throw DomainError("ErrorCov: k must be at least 1");
    switch (kind_) {
        case Kind::Scalar:
            return variance() * MatrixXd::Identity(k, k);
        case Kind::CompoundSymmetry: {
            MatrixXd m = MatrixXd::Constant(k, k, variance() * rho_eps_);
            m.diagonal().setConstant(variance());
            return m;
        }
        case Kind::Dense:
            if (dense_.rows() != k)
                throw DomainError("ErrorCov: dense covariance dimension does not match k");
            return dense_;
    }
    throw DomainError("ErrorCov: unknown kind");
}

VarianceComponents VarianceComponents::from_sigmas(double sigma1, double sigma2,
                                                   double rho, double sigma_eps) {
    if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0))
        throw DomainError("VarianceComponents: standard deviations must be non-negative");
    if (!(std::abs(rho) <= 1.0))
        throw DomainError("VarianceComponents: |rho| <= 1 required");
    VarianceComponents vc;
    vc.sigma_gamma.resize(2, 2);
    vc.sigma_gamma << sigma1 * sigma1, rho * sigma1 * sigma2,
                      rho * sigma1 * sigma2, sigma2 * sigma2;
    vc.sigma_eps = ErrorCov::scalar(sigma_eps);
    return vc;
}

void VarianceComponents::validate(int p2) const {
    if (sigma_gamma.rows() != p2 || sigma_gamma.cols() != p2)
        throw DomainError("VarianceComponents: sigma_gamma must be p2 x p2");
    if (!linalg::is_symmetric_psd(sigma_gamma))
        throw DomainError("VarianceComponents: sigma_gamma must be symmetric non-negative definite");
}

ProductModel::ProductModel(std::vector<Basis> stress_bases, Basis time_basis)
    : stress_bases_(std::move(stress_bases)), time_basis_(std::move(time_basis)) {
    if (stress_bases_.empty())
        throw DomainError("ProductModel: at least one stress basis required");
    for (const Basis& b : stress_bases_) {
        if (!b.has_intercept())
            throw DomainError("ProductModel: stress bases must carry an intercept");
        p1_ *= b.dimension();
        stress_arity_ += b.arity();
    }
}

std::vector<VectorXd> ProductModel::split_stress(const VectorXd& x) const {
    if (x.size() != stress_arity_)
        throw DomainError("ProductModel: stress vector has wrong dimension");
    std::vector<VectorXd> parts;
    parts.reserve(stress_bases_.size());
    int off = 0;
    for (const Basis& b : stress_bases_) {
        parts.push_back(x.segment(off, b.arity()));
        off += b.arity();
    }
    return parts;
}

bool ProductModel::stress_in_region(const VectorXd& x, double tol) const {
    if (x.size() != stress_arity_) return false;
    auto parts = split_stress(x);
    for (size_t g = 0; g < stress_bases_.size(); ++g)
        if (!stress_bases_[g].contains(parts[g], tol)) return false;
    return true;
}

VectorXd ProductModel::f1(const VectorXd& x) const {
    auto parts = split_stress(x);
    VectorXd acc = stress_bases_[0].eval(parts[0]);
    for (size_t g = 1; g < stress_bases_.size(); ++g)
        acc = linalg::kron(acc, stress_bases_[g].eval(parts[g]));
    return acc;
}

VectorXd ProductModel::f(const VectorXd& x, double t) const {
    return linalg::kron(f1(x), time_basis_.eval1(t));
}

void Scenario::validate() const {
    if (beta.size() != model.p())
        throw DomainError("Scenario: beta length must equal p1*p2");
    varcomps.validate(model.p2());
    if (use_condition.size() != model.stress_arity())
        throw DomainError("Scenario: use condition has wrong dimension");
    if (!std::isfinite(threshold))
        throw DomainError("Scenario: threshold must be finite");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("Scenario: alpha must lie in (0,1)");
    for (double t : time_plan)
        if (!model.time_basis().contains1(t))
            throw DomainError("Scenario: time plan point outside the time region");
}

}  // namespace adt
