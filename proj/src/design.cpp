#include "adt/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adt/errors.hpp"
#include "adt/linalg.hpp"

namespace adt {

namespace {
constexpr double kMergeTol = 1e-9;
constexpr double kWeightSumTol = 1e-12;
}  // namespace

ApproximateDesign ApproximateDesign::make(std::vector<VectorXd> points, VectorXd w) {
    if (points.empty() || static_cast<Eigen::Index>(points.size()) != w.size())
        throw DomainError("ApproximateDesign: support and weights must match and be non-empty");
    // Merge near-duplicate support points, summing their weights.
    std::vector<VectorXd> sup;
    std::vector<double> wm;
    for (size_t i = 0; i < points.size(); ++i) {
        if (w(i) < 0.0)
            throw DomainError("ApproximateDesign: negative weight");
        bool merged = false;
        for (size_t j = 0; j < sup.size(); ++j) {
            if (points[i].size() == sup[j].size() &&
                (points[i] - sup[j]).cwiseAbs().maxCoeff() <= kMergeTol) {
                wm[j] += w(i);
                merged = true;
                break;
            }
        }
        if (!merged) {
            sup.push_back(points[i]);
            wm.push_back(w(i));
        }
    }
    // Drop numerically-zero weights.
    ApproximateDesign d;
    for (size_t j = 0; j < sup.size(); ++j) {
        if (wm[j] > 1e-14) d.support.push_back(sup[j]);
    }
    d.weights.resize(d.support.size());
    int idx = 0;
    for (size_t j = 0; j < sup.size(); ++j)
        if (wm[j] > 1e-14) d.weights(idx++) = wm[j];
    d.validate();
    return d;
}

ApproximateDesign ApproximateDesign::make1d(const std::vector<double>& points,
                                            const std::vector<double>& weights) {
    std::vector<VectorXd> pts;
    pts.reserve(points.size());
    for (double p : points) pts.push_back(VectorXd::Constant(1, p));
    VectorXd w = Eigen::Map<const VectorXd>(weights.data(), weights.size());
    return make(std::move(pts), w);
}

void ApproximateDesign::validate() const {
    if (support.empty()) throw DomainError("ApproximateDesign: empty support");
    const int d = static_cast<int>(support[0].size());
    for (const auto& x : support)
        if (x.size() != d) throw DomainError("ApproximateDesign: mixed point dimensions");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (!(weights(i) > 0.0)) throw DomainError("ApproximateDesign: weights must be positive");
    if (std::abs(weights.sum() - 1.0) > kWeightSumTol)
        throw DomainError("ApproximateDesign: weights must sum to 1 within 1e-12");
}

MatrixXd design_info(const ApproximateDesign& xi, const FeatureMap& f) {
    VectorXd f0 = f(xi.support[0]);
    MatrixXd M = MatrixXd::Zero(f0.size(), f0.size());
    for (int i = 0; i < xi.size(); ++i) {
        VectorXd fi = f(xi.support[i]);
        M.noalias() += xi.weights(i) * fi * fi.transpose();
    }
    return M;
}

MatrixXd stress_info(const ApproximateDesign& xi, const ProductModel& model) {
    for (const auto& x : xi.support)
        if (!model.stress_in_region(x))
            throw DomainError("stress_info: support point outside the stress region");
    return design_info(xi, [&](const VectorXd& x) { return model.f1(x); });
}

CValue c_criterion_info(const MatrixXd& M, const VectorXd& c) {
    if (M.rows() != c.size())
        throw DomainError("c_criterion: dimension mismatch between M and c");
    CValue out;
    if (!linalg::in_range(M, c)) {
        out.feasible = false;
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    MatrixXd Minv = linalg::psd_pseudo_inverse(M);
    out.value = c.dot(Minv * c);
    return out;
}

CValue c_criterion(const ApproximateDesign& xi, const ProductModel& model,
                   const VectorXd& c) {
    return c_criterion_info(stress_info(xi, model), c);
}

ApproximateDesign product_design(const ApproximateDesign& a, const ApproximateDesign& b) {
    std::vector<VectorXd> pts;
    std::vector<double> w;
    pts.reserve(a.size() * b.size());
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < b.size(); ++j) {
            VectorXd p(a.dim() + b.dim());
            p << a.support[i], b.support[j];
            pts.push_back(p);
            w.push_back(a.weights(i) * b.weights(j));
        }
    }
    VectorXd wv = Eigen::Map<const VectorXd>(w.data(), w.size());
    return ApproximateDesign::make(std::move(pts), wv);
}

EfficiencyValue efficiency(const ApproximateDesign& candidate,
                           const ApproximateDesign& optimum,
                           const ProductModel& model, const VectorXd& c) {
    CValue cand = c_criterion(candidate, model, c);
    CValue ref = c_criterion(optimum, model, c);
    EfficiencyValue out;
    if (!cand.feasible) {
        out.feasible = false;
        out.value = 0.0;
        return out;
    }
    if (!ref.feasible)
        throw DomainError("efficiency: reference design is infeasible for c");
    out.value = ref.value / cand.value;
    return out;
}

ApproximateDesign uniform_grid_design(int m, double lo, double hi) {
    if (m < 2) throw DomainError("uniform_grid_design: m must be at least 2");
    std::vector<double> pts(m), w(m, 1.0 / m);
    for (int i = 0; i < m; ++i)
        pts[i] = lo + (hi - lo) * static_cast<double>(i) / (m - 1);
    return ApproximateDesign::make1d(pts, w);
}

double phi_c_optimal_extrapolation(double xu) {
    if (xu > 0.0) throw DomainError("phi_c_optimal_extrapolation: requires x_u <= 0");
    return (1.0 + 2.0 * std::abs(xu)) * (1.0 + 2.0 * std::abs(xu));
}

double phi_c_uniform_grid(int m, double xu) {
    if (m != 0 && m < 2) throw DomainError("phi_c_uniform_grid: m must be 0 (limit) or >= 2");
    const double am = (m == 0) ? 3.0 : 3.0 * (m - 1) / (m + 1.0);
    return 1.0 + am * phi_c_optimal_extrapolation(xu);
}

double eff_uniform_grid(int m, double xu) {
    return phi_c_optimal_extrapolation(xu) / phi_c_uniform_grid(m, xu);
}

std::vector<long> round_to_exact(const ApproximateDesign& xi, long n_units) {
    const int m = xi.size();
    if (n_units < m)
        throw DomainError("round_to_exact: n_units too small; need at least " +
                          std::to_string(m) + " units for " + std::to_string(m) +
                          " support points");
    std::vector<long> freq(m);
    std::vector<std::pair<double, int>> rem(m);
    long assigned = 0;
    for (int i = 0; i < m; ++i) {
        const double quota = n_units * xi.weights(i);
        freq[i] = static_cast<long>(std::floor(quota));
        rem[i] = {quota - freq[i], i};
        assigned += freq[i];
    }
    // Hand out the leftover units by largest remainder, index as tie-break;
    // every frequency stays within one unit of its quota n*w_i.
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (long r = 0; r < n_units - assigned; ++r) freq[rem[r % m].second] += 1;
    return freq;
}

}  // namespace adt
