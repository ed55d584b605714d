#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "pspp/moments.hpp"
#include "pspp/samplers.hpp"

namespace pspp {

// Joint heavy-tailed elliptical law for (X, Y) with n dof and partitioned
// scale matrix [[C11, C12], [C12', C22]].
struct TJointSpec {
    double n = 0.0;
    Vector mu_x, mu_y;
    Matrix c11, c22, c12;  // c12 is m x p

    Index dim_x() const { return mu_x.size(); }
    Index dim_y() const { return mu_y.size(); }
    Matrix stacked_scale() const;
    void validate() const;
};

// 2x2 Wishart law: dof n and parameter matrix S.
struct WishartSpec {
    double n = 0.0;
    Matrix s;  // 2x2, positive definite

    void validate() const;
};

struct StudentConditional {
    MomentPair moments;  // mean and covariance of (X - A_xy Y) | Y = y
    Matrix scale;        // scale matrix of the conditional law
    double factor;       // 1 + (y-mu_y)' C22^{-1} (y-mu_y) / n
    double dof;          // n + p
};

// Conditional moments of the residual X - A_xy Y given Y = y under the
// joint t law; the conditional covariance inflates with the distance of y
// from mu_y, which is exactly what the Monte Carlo checker probes.
StudentConditional student_t_conditional_moments(const TJointSpec& spec,
                                                 const Vector& y);

struct InvertedTConditional {
    Vector location;
    Matrix scale;   // (C11 - A C22 A') * factor
    double factor;  // 1 - (y-mu_y)' C22^{-1} (y-mu_y) / n, in (0, 1]
    double dof;     // n (unchanged by conditioning)
};

// Same, for the bounded-support inverted law; requires the quadratic form
// to stay below n.
InvertedTConditional inverted_t_conditional_moments(const TJointSpec& spec,
                                                    const Vector& y);

// Draw from the bounded-support inverted law via its constructive
// definition: X = sqrt(n) C^{1/2} (S + z z')^{-1/2} z + mu with z standard
// normal and S Wishart(n + p - 1, I).  Every draw satisfies
// (X - mu)' C^{-1} (X - mu) <= n.
Vector sample_inverted_t(double n, const Vector& mu, const Matrix& c,
                         Rng& rng);

struct WishartPartitionReport {
    Vector prior_mean;  // of (X, Y) = (S_12 block, S_22 block)
    Matrix prior_cov;
    double a_xy;        // S12 / S22
    double resid_mean;  // E(X - A_xy Y) = 0
    double resid_var;   // n (S11 S22 - S12^2)
    double cond_mean;   // E(X | Y = y) = S12 y / S22
    double cond_var;    // (S11 - S12^2 / S22) y
};

// Joint and conditional moments of the off-diagonal entry given the
// diagonal entry of a 2x2 Wishart draw; cond_var equals resid_var exactly
// at y = n S22.
WishartPartitionReport wishart_partition_moments(const WishartSpec& spec,
                                                 double y);

using JointSampler = std::function<std::pair<Vector, Vector>(Rng&)>;

// Per-bin behaviour of the residual X - A_xy Y across equal-count bins of
// the Mahalanobis distance of Y from its mean.  Deviations are relative to
// the pooled scale; *_se fields give the Monte Carlo standard error on the
// same scale, so dev <= k * se is a k-sigma acceptance.
struct IndependenceReport {
    std::vector<Vector> bin_means;
    std::vector<Matrix> bin_covs;
    std::vector<std::size_t> bin_counts;
    double max_mean_dev = 0.0;
    double max_cov_dev = 0.0;
    double mean_se = 0.0;
    double cov_se = 0.0;

    bool within(double n_sigmas) const {
        return max_mean_dev <= n_sigmas * mean_se &&
               max_cov_dev <= n_sigmas * cov_se;
    }
};

IndependenceReport mc_second_order_check(const JointSampler& sampler,
                                         const Matrix& a_xy, int bins,
                                         int draws, Rng& rng);

// Joint (X, Y) draw from the TJointSpec law, for feeding the checker.
std::pair<Vector, Vector> sample_t_joint(const TJointSpec& spec, Rng& rng);

}  // namespace pspp
