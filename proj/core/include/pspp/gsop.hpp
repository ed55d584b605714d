#pragma once

#include "pspp/moments.hpp"

namespace pspp {

// Belief about a p x p observation covariance V, carried on vech space:
// vech(V) ~ {vech(v_hat), k / eta}.  v_hat is kept exactly as the update
// formulas produce it, which can be indefinite; callers needing an
// invertible Sigma_y + V use psd_projected_v().
struct MatrixVarBelief {
    Matrix v_hat;  // p x p, symmetric
    Matrix k;      // d x d with d = p(p+1)/2, PSD
    double eta = 0.0;
    double alpha = 1.0;

    Index dim() const { return v_hat.rows(); }
    Matrix mean() const { return v_hat; }
    Matrix cov_vech() const { return k / eta; }
    void validate() const;
};

// Moment-unbiased variance observation: (y - mu_y)(y - mu_y)' - Sigma_y.
Matrix gsop_tau(const Vector& mu_y, const Matrix& sigma_y, const Vector& y);

// Posterior belief after observing tau: mean (eta v_hat + alpha tau)/(eta
// + alpha), vech covariance k/(eta + alpha).
MatrixVarBelief gsop_v_update(const MatrixVarBelief& b, const Matrix& tau);

// Joint moments in the additive-V form: Var(Y|V) = sigma_y + V and
// Cov(X,Y|V) = a (sigma_y + V) with the regression matrix a known and
// free of V.
struct GsopJoint {
    Vector mu_x, mu_y;
    Matrix sigma_x;  // m x m
    Matrix sigma_y;  // p x p
    Matrix a;        // m x p, known regression matrix

    void validate() const;
};

// Posterior moments of X when the regression matrix does not depend on V:
//   mean = mu_x + a (y - mu_y)
//   cov  = sigma_x - (eta + alpha)^{-1} a (sigma_y + eta v_hat + alpha tau) a'
MomentPair gsop_posterior_fixed_a(const GsopJoint& j, const Vector& y,
                                  const MatrixVarBelief& b);

// Plug-in estimates of the first two moments of (Sigma_y + V)^{-1}:
//   v_tilde  = (eta+alpha) {(eta+alpha) Sigma_y + eta v_hat + alpha tau}^{-1}
//   v_tilde2 = k / (eta + alpha)
struct VtildePair {
    Matrix v_tilde;   // p x p, PD
    Matrix v_tilde2;  // d x d, PSD
};

VtildePair vtilde_pair(const Matrix& sigma_y, const MatrixVarBelief& b,
                       const Matrix& tau);

// Regression model y = B x + eps with unknown Var(eps) = V.
struct RegressionSpec {
    Matrix b;  // p x m design
    Vector mu_x;
    Matrix sigma_x;
};

// Posterior moments of x given y under the plug-in pair; the correction
// term couples the uncertainty about (Sigma_y + V)^{-1} into the state
// covariance through the duplication matrix:
//   mean = mu_x + Sigma_x B' v_tilde (y - mu_y)
//   cov  = Sigma_x - Sigma_x B' v_tilde B Sigma_x
//          + {(y-mu_y)' (x) Sigma_x B'} G_p v_tilde2 G_p' {(y-mu_y) (x) B Sigma_x}
MomentPair gsop_regression_posterior(const RegressionSpec& model,
                                     const Vector& y, const VtildePair& vt,
                                     const Vector& mu_y);

// Eigenvalue clipping at floor_scale * trace(v)/p (nonnegative), for
// callers that must invert Sigma_y + V.
Matrix psd_projected_v(const Matrix& v, double floor_scale = 1e-8);

}  // namespace pspp
