#pragma once

#include <optional>

#include "pspp/moments.hpp"

namespace pspp {

// Belief about an unknown scalar observation variance V:
// V | K ~ (v_hat, k / eta), with k = alpha * Var(T | V) by construction.
struct ScalarVarBelief {
    double v_hat = 1.0;
    double k = 1.0;
    double eta = 1.0;
    double alpha = 1.0;

    double mean() const { return v_hat; }
    double variance() const { return k / eta; }
    void validate() const;
};

// Inverse-gamma prior in chi-square form: nu * s / V ~ chi^2_nu.
struct ConjugateSOPPrior {
    double nu = 0.0;
    double s = 0.0;

    void validate() const;
};

// tau = (y - mu_y)' Sigma_y^{-1} (y - mu_y), the variance observation of
// the scaled-precision model.
double sop_tau(const JointMoments& j, const Vector& y,
               double condition_cap = kConditionCap);

// Linear belief revision given T = tau:
//   posterior mean (eta v_hat + alpha tau)/(eta + alpha),
//   posterior variance k/(eta + alpha).
ScalarVarBelief sop_v_update(const ScalarVarBelief& b, double tau);

// Posterior moments of X when every covariance block is scaled by the
// unknown V: the regression matrix is free of V and the posterior
// covariance carries the revised variance estimate as a scalar factor.
MomentPair sop_posterior_x(const JointMoments& j, const Vector& y,
                           const ScalarVarBelief& b);

struct ConjugateSOPPosterior {
    double t_dof;                      // nu + p
    Vector t_location;                 // mu_x + A (y - mu_y)
    Matrix t_scale;                    // (nu s + tau)/(nu + p) (Sx - A Sy A')
    Matrix t_cov;                      // scale * dof/(dof - 2)
    double v_mean;                     // (nu s + tau)/(nu + p - 2)
    std::optional<double> v_variance;  // requires nu + p > 4
    double tau;
};

// Exact posterior of the normal / inverse-gamma counterpart: X|Y=y is a
// heavy-tailed law with nu + p dof, and (nu s + tau)/V | Y=y ~ chi^2_{nu+p}.
ConjugateSOPPosterior conjugate_posterior(const ConjugateSOPPrior& prior,
                                          const JointMoments& j,
                                          const Vector& y);

// Parameter map under which the moment-based posterior and the conjugate
// posterior agree exactly.
struct SopMatch {
    double v_hat;  // nu s / (nu + p - 3)
    double eta;    // nu + p - 3
    double alpha;  // 1

    // K making the two V-posterior variances equal:
    // 2 (tau + nu s)^2 / {(nu + p - 2)(nu + p - 4)}
    double matching_k(double tau) const;

    // When the prior is instead mean-matched (v_hat = nu s/(nu - 2)), the
    // two posterior V means differ by (p-1) nu s / {(nu-2)(nu+p-2)};
    // absent for nu <= 2.
    std::optional<double> discrepancy;
    double mean_matched_v_hat() const;  // nu s / (nu - 2), requires nu > 2

    double nu, s;
    int p;
};

SopMatch conjugate_match_params(const ConjugateSOPPrior& prior, int p);

}  // namespace pspp
