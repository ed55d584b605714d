#include "pspp/sop.hpp"

#include <cmath>
#include <string>

namespace pspp {

void ScalarVarBelief::validate() const {
    if (v_hat <= 0.0 || k <= 0.0 || eta <= 0.0 || alpha <= 0.0) {
        throw domain_error(
            "ScalarVarBelief: v_hat, k, eta, alpha must all be positive");
    }
}

void ConjugateSOPPrior::validate() const {
    if (nu <= 0.0 || s <= 0.0) {
        throw domain_error("ConjugateSOPPrior: nu and s must be positive");
    }
}

double sop_tau(const JointMoments& j, const Vector& y, double condition_cap) {
    if (y.size() != j.dim_y()) {
        throw dimension_error("sop_tau: y dimension mismatch");
    }
    return quad_form_inv(j.sigma_y, y - j.mu_y, condition_cap);
}

ScalarVarBelief sop_v_update(const ScalarVarBelief& b, double tau) {
    b.validate();
    if (tau < 0.0) throw domain_error("sop_v_update: tau must be nonnegative");
    ScalarVarBelief post = b;
    post.v_hat = (b.eta * b.v_hat + b.alpha * tau) / (b.eta + b.alpha);
    post.eta = b.eta + b.alpha;
    return post;
}

MomentPair sop_posterior_x(const JointMoments& j, const Vector& y,
                           const ScalarVarBelief& b) {
    b.validate();
    const double tau = sop_tau(j, y);
    const Matrix a = regression_matrix(j.cov_xy, j.sigma_y);
    const double v_post = (b.eta * b.v_hat + b.alpha * tau) / (b.eta + b.alpha);

    MomentPair post;
    post.mean = j.mu_x + a * (y - j.mu_y);
    post.cov =
        symmetrize(v_post * (j.sigma_x - a * j.sigma_y * a.transpose()));
    return post;
}

ConjugateSOPPosterior conjugate_posterior(const ConjugateSOPPrior& prior,
                                          const JointMoments& j,
                                          const Vector& y) {
    prior.validate();
    const double p = static_cast<double>(j.dim_y());
    const double dof = prior.nu + p;
    if (dof <= 2.0) {
        throw domain_error("conjugate_posterior: nu + p must exceed 2 for "
                           "posterior moments to exist");
    }
    const double tau = sop_tau(j, y);
    const Matrix a = regression_matrix(j.cov_xy, j.sigma_y);
    const Matrix shape = symmetrize(j.sigma_x - a * j.sigma_y * a.transpose());
    const double scale_sum = prior.nu * prior.s + tau;

    ConjugateSOPPosterior out;
    out.t_dof = dof;
    out.t_location = j.mu_x + a * (y - j.mu_y);
    out.t_scale = (scale_sum / dof) * shape;
    out.t_cov = (scale_sum / (dof - 2.0)) * shape;
    out.v_mean = scale_sum / (dof - 2.0);
    if (dof > 4.0) {
        out.v_variance = 2.0 * scale_sum * scale_sum /
                         ((dof - 2.0) * (dof - 2.0) * (dof - 4.0));
    }
    out.tau = tau;
    return out;
}

double SopMatch::matching_k(double tau) const {
    const double dof = nu + static_cast<double>(p);
    if (dof <= 4.0) {
        throw domain_error("SopMatch::matching_k: nu + p must exceed 4");
    }
    const double scale_sum = tau + nu * s;
    return 2.0 * scale_sum * scale_sum / ((dof - 2.0) * (dof - 4.0));
}

double SopMatch::mean_matched_v_hat() const {
    if (nu <= 2.0) {
        throw domain_error("SopMatch::mean_matched_v_hat: requires nu > 2");
    }
    return nu * s / (nu - 2.0);
}

SopMatch conjugate_match_params(const ConjugateSOPPrior& prior, int p) {
    prior.validate();
    if (p < 1) throw domain_error("conjugate_match_params: p must be >= 1");
    const double dof = prior.nu + static_cast<double>(p);
    if (dof <= 3.0) {
        throw domain_error("conjugate_match_params: nu + p must exceed 3");
    }
    SopMatch m;
    m.v_hat = prior.nu * prior.s / (dof - 3.0);
    m.eta = dof - 3.0;
    m.alpha = 1.0;
    m.nu = prior.nu;
    m.s = prior.s;
    m.p = p;
    if (prior.nu > 2.0) {
        m.discrepancy = (static_cast<double>(p) - 1.0) * prior.nu * prior.s /
                        ((prior.nu - 2.0) * (dof - 2.0));
    }
    return m;
}

}  // namespace pspp
