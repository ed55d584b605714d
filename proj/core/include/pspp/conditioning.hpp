#pragma once

#include <vector>

#include "pspp/moments.hpp"

namespace pspp {

// Moment update under second-order conditional independence of the
// residual X - A_xy * Y from Y:
//   mean = mu_x + A_xy (y - mu_y),  cov = Sigma_x - A_xy Sigma_y A_xy'.
// The returned covariance does not depend on y and is PSD-clipped against
// rounding; a materially indefinite result throws.
MomentPair pspp1_condition(const JointMoments& j, const Vector& y,
                           double condition_cap = kConditionCap);

struct ScalarRule {
    double mu;    // posterior mean estimate
    double risk;  // posterior expected quadratic risk
};

// Minimum-risk linear estimate of E(X|Y=y) for scalar X with known
// observation variance v:  mu = (E(X) v + y Var(X)) / (v + Var(X)).
ScalarRule bayes_linear_scalar(const MomentPair& prior, double v, double y);

struct GoldsteinRule {
    double v_star;   // linear-rule estimate of the observation variance
    double a_star;   // revised regression coefficient Var(X)/(Var(X)+v_star)
    double mu_star;  // variance-modified mean estimate
};

// Variance-modified linear rule: V is first estimated from an unbiased
// statistic y* with prior spread var_ystar, then plugged into the mean
// rule.  y*/Y* are caller-supplied; no attempt is made to derive y* from y.
GoldsteinRule goldstein_variance_modified(const MomentPair& prior_x,
                                          const MomentPair& prior_v,
                                          double var_ystar, double ystar,
                                          double y);

// A finite discrete joint law over paired support points.
struct DiscreteJoint {
    std::vector<Vector> x;
    std::vector<Vector> y;
    std::vector<double> prob;

    void validate() const;
};

struct EquivalenceReport {
    // E(X|Y=y) affine in y with slope A_xy and Var(X|Y=y) constant.
    bool linear_mean;
    // mean and variance of X - A_xy Y given Y=y constant over the support.
    bool so_independent;

    // the two properties must hold or fail together
    bool equivalent() const { return linear_mean == so_independent; }
};

// Checks, by exhaustive enumeration over the support, that the linear
// posterior-mean property and second-order independence of the residual
// from Y hold or fail together.  "Constant over support" means a maximum
// deviation of at most tol * scale.
EquivalenceReport theorem1_check(const DiscreteJoint& joint,
                                 double tol = 1e-9);

}  // namespace pspp
