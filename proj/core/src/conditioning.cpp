#include "pspp/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace pspp {

MomentPair pspp1_condition(const JointMoments& j, const Vector& y,
                           double condition_cap) {
    if (y.size() != j.dim_y()) {
        throw dimension_error("pspp1_condition: y has length " +
                              std::to_string(y.size()) + ", expected " +
                              std::to_string(j.dim_y()));
    }
    const Matrix a = regression_matrix(j.cov_xy, j.sigma_y, condition_cap);
    MomentPair post;
    post.mean = j.mu_x + a * (y - j.mu_y);
    post.cov = psd_clip(symmetrize(j.sigma_x - a * j.sigma_y * a.transpose()));
    return post;
}

ScalarRule bayes_linear_scalar(const MomentPair& prior, double v, double y) {
    if (prior.mean.size() != 1 || prior.cov.rows() != 1) {
        throw dimension_error("bayes_linear_scalar: prior must be 1-dimensional");
    }
    const double ex = prior.mean[0];
    const double var_x = prior.cov(0, 0);
    if (v <= 0.0 || var_x <= 0.0) {
        throw domain_error("bayes_linear_scalar: variances must be positive");
    }
    ScalarRule r;
    r.mu = (ex * v + y * var_x) / (v + var_x);
    r.risk = var_x * v / (var_x + v);
    return r;
}

GoldsteinRule goldstein_variance_modified(const MomentPair& prior_x,
                                          const MomentPair& prior_v,
                                          double var_ystar, double ystar,
                                          double y) {
    if (prior_x.mean.size() != 1 || prior_v.mean.size() != 1) {
        throw dimension_error(
            "goldstein_variance_modified: priors must be 1-dimensional");
    }
    const double ex = prior_x.mean[0];
    const double var_x = prior_x.cov(0, 0);
    const double ev = prior_v.mean[0];
    const double var_v = prior_v.cov(0, 0);
    if (var_x <= 0.0 || var_ystar <= 0.0 || var_v < 0.0) {
        throw domain_error(
            "goldstein_variance_modified: variances must be positive");
    }
    GoldsteinRule r;
    r.v_star = (ev * var_ystar + ystar * var_v) / (var_ystar + var_v);
    r.a_star = var_x / (var_x + r.v_star);
    r.mu_star = ex + r.a_star * (y - ex);
    return r;
}

void DiscreteJoint::validate() const {
    const std::size_t n = prob.size();
    if (n == 0 || x.size() != n || y.size() != n) {
        throw dimension_error("DiscreteJoint: x, y, prob must be nonempty and "
                              "of equal length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (prob[i] < 0.0) {
            throw domain_error("DiscreteJoint: negative probability");
        }
        if (x[i].size() != x[0].size() || y[i].size() != y[0].size()) {
            throw dimension_error("DiscreteJoint: ragged support vectors");
        }
        total += prob[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw domain_error("DiscreteJoint: probabilities sum to " +
                           std::to_string(total) + ", expected 1");
    }
}

namespace {

struct VectorLess {
    bool operator()(const Vector& a, const Vector& b) const {
        for (Index i = 0; i < std::min(a.size(), b.size()); ++i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return a.size() < b.size();
    }
};

struct GroupMoments {
    double prob = 0.0;
    Vector mean;
    Matrix cov;
};

// Conditional mean and covariance of value_of(i) given membership in each
// distinct-y group.
template <typename ValueFn>
std::map<Vector, GroupMoments, VectorLess> conditional_moments(
    const DiscreteJoint& joint, ValueFn value_of) {
    std::map<Vector, GroupMoments, VectorLess> groups;
    const Index d = value_of(0).size();
    for (std::size_t i = 0; i < joint.prob.size(); ++i) {
        auto& g = groups[joint.y[i]];
        if (g.mean.size() == 0) {
            g.mean = Vector::Zero(d);
            g.cov = Matrix::Zero(d, d);
        }
        const Vector v = value_of(i);
        g.prob += joint.prob[i];
        g.mean += joint.prob[i] * v;
        g.cov += joint.prob[i] * v * v.transpose();
    }
    for (auto& [yval, g] : groups) {
        if (g.prob <= 0.0) continue;
        g.mean /= g.prob;
        g.cov = g.cov / g.prob - g.mean * g.mean.transpose();
    }
    return groups;
}

}  // namespace

EquivalenceReport theorem1_check(const DiscreteJoint& joint, double tol) {
    joint.validate();
    const std::size_t n = joint.prob.size();
    const Index m = joint.x[0].size();
    const Index p = joint.y[0].size();

    Vector mu_x = Vector::Zero(m);
    Vector mu_y = Vector::Zero(p);
    for (std::size_t i = 0; i < n; ++i) {
        mu_x += joint.prob[i] * joint.x[i];
        mu_y += joint.prob[i] * joint.y[i];
    }
    Matrix sigma_y = Matrix::Zero(p, p);
    Matrix cov_xy = Matrix::Zero(m, p);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector dy = joint.y[i] - mu_y;
        sigma_y += joint.prob[i] * dy * dy.transpose();
        cov_xy += joint.prob[i] * (joint.x[i] - mu_x) * dy.transpose();
    }

    auto x_groups =
        conditional_moments(joint, [&](std::size_t i) { return joint.x[i]; });
    if (x_groups.size() < 2) {
        throw domain_error("theorem1_check: Y is degenerate (single support "
                           "point); need at least two distinct y values");
    }

    const Matrix a = regression_matrix(cov_xy, sigma_y);
    auto resid_groups = conditional_moments(
        joint, [&](std::size_t i) -> Vector { return joint.x[i] - a * joint.y[i]; });

    // probability-weighted references for the "constant over support" tests
    auto weighted_mean = [](const auto& groups, auto member) {
        auto it = groups.begin();
        auto acc = (member(it->second) * it->second.prob).eval();
        for (++it; it != groups.end(); ++it) {
            acc += member(it->second) * it->second.prob;
        }
        return acc;
    };
    const Matrix x_cov_ref =
        weighted_mean(x_groups, [](const GroupMoments& g) { return g.cov; });
    const Vector r_mean_ref =
        weighted_mean(resid_groups, [](const GroupMoments& g) { return g.mean; });
    const Matrix r_cov_ref =
        weighted_mean(resid_groups, [](const GroupMoments& g) { return g.cov; });

    double mean_dev = 0.0, mean_scale = 1.0;
    double var_dev = 0.0, var_scale = 1.0;
    for (const auto& [yval, g] : x_groups) {
        const Vector predicted = mu_x + a * (yval - mu_y);
        mean_dev = std::max(mean_dev, (g.mean - predicted).cwiseAbs().maxCoeff());
        mean_scale = std::max({mean_scale, g.mean.cwiseAbs().maxCoeff(),
                               predicted.cwiseAbs().maxCoeff()});
        var_dev = std::max(var_dev, (g.cov - x_cov_ref).cwiseAbs().maxCoeff());
        var_scale = std::max(var_scale, g.cov.cwiseAbs().maxCoeff());
    }

    double r_mean_dev = 0.0, r_mean_scale = 1.0;
    double r_var_dev = 0.0, r_var_scale = 1.0;
    for (const auto& [yval, g] : resid_groups) {
        r_mean_dev =
            std::max(r_mean_dev, (g.mean - r_mean_ref).cwiseAbs().maxCoeff());
        r_mean_scale = std::max(r_mean_scale, g.mean.cwiseAbs().maxCoeff());
        r_var_dev = std::max(r_var_dev, (g.cov - r_cov_ref).cwiseAbs().maxCoeff());
        r_var_scale = std::max(r_var_scale, g.cov.cwiseAbs().maxCoeff());
    }

    EquivalenceReport rep;
    rep.linear_mean =
        mean_dev <= tol * mean_scale && var_dev <= tol * var_scale;
    rep.so_independent =
        r_mean_dev <= tol * r_mean_scale && r_var_dev <= tol * r_var_scale;
    return rep;
}

}  // namespace pspp
