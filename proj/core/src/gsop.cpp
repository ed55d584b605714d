#include "pspp/gsop.hpp"

#include <string>

namespace pspp {

void MatrixVarBelief::validate() const {
    const Index p = v_hat.rows();
    require_symmetric(v_hat, "MatrixVarBelief.v_hat");
    if (k.rows() != vech_size(p) || k.cols() != vech_size(p)) {
        throw dimension_error("MatrixVarBelief: k must be d x d with d = "
                              "p(p+1)/2 = " +
                              std::to_string(vech_size(p)));
    }
    require_symmetric(k, "MatrixVarBelief.k");
    if (eta <= 0.0 || alpha <= 0.0) {
        throw domain_error("MatrixVarBelief: eta and alpha must be positive");
    }
    const double lam = min_eigenvalue(k);
    if (lam < -1e-10 * std::max(1.0, k.cwiseAbs().maxCoeff())) {
        throw not_psd_error("MatrixVarBelief: k is not PSD", lam);
    }
}

Matrix gsop_tau(const Vector& mu_y, const Matrix& sigma_y, const Vector& y) {
    if (y.size() != mu_y.size() || sigma_y.rows() != mu_y.size()) {
        throw dimension_error("gsop_tau: dimension mismatch");
    }
    const Vector d = y - mu_y;
    return symmetrize(d * d.transpose() - sigma_y);
}

MatrixVarBelief gsop_v_update(const MatrixVarBelief& b, const Matrix& tau) {
    b.validate();
    if (tau.rows() != b.dim() || tau.cols() != b.dim()) {
        throw dimension_error("gsop_v_update: tau dimension mismatch");
    }
    MatrixVarBelief post = b;
    post.v_hat = symmetrize((b.eta * b.v_hat + b.alpha * tau) / (b.eta + b.alpha));
    post.eta = b.eta + b.alpha;
    return post;
}

void GsopJoint::validate() const {
    const Index m = mu_x.size();
    const Index p = mu_y.size();
    if (sigma_x.rows() != m || sigma_x.cols() != m || sigma_y.rows() != p ||
        sigma_y.cols() != p || a.rows() != m || a.cols() != p) {
        throw dimension_error("GsopJoint: inconsistent dimensions");
    }
    require_symmetric(sigma_x, "GsopJoint.sigma_x");
    require_symmetric(sigma_y, "GsopJoint.sigma_y");
}

MomentPair gsop_posterior_fixed_a(const GsopJoint& j, const Vector& y,
                                  const MatrixVarBelief& b) {
    j.validate();
    b.validate();
    if (y.size() != j.mu_y.size() || b.dim() != j.mu_y.size()) {
        throw dimension_error("gsop_posterior_fixed_a: dimension mismatch");
    }
    const Matrix tau = gsop_tau(j.mu_y, j.sigma_y, y);
    MomentPair post;
    post.mean = j.mu_x + j.a * (y - j.mu_y);
    post.cov = symmetrize(
        j.sigma_x - (j.a * (j.sigma_y + b.eta * b.v_hat + b.alpha * tau) *
                     j.a.transpose()) /
                        (b.eta + b.alpha));
    return post;
}

VtildePair vtilde_pair(const Matrix& sigma_y, const MatrixVarBelief& b,
                       const Matrix& tau) {
    b.validate();
    const Index p = b.dim();
    if (sigma_y.rows() != p || tau.rows() != p || tau.cols() != p) {
        throw dimension_error("vtilde_pair: dimension mismatch");
    }
    const Matrix inner = symmetrize((b.eta + b.alpha) * sigma_y +
                                    b.eta * b.v_hat + b.alpha * tau);
    const double lam = min_eigenvalue(inner);
    if (lam <= 0.0) {
        throw singular_error(
            "vtilde_pair: (eta+alpha) Sigma_y + eta V_hat + alpha tau is not "
            "positive definite (eigenvalue " +
                std::to_string(lam) + ")",
            std::numeric_limits<double>::infinity());
    }
    VtildePair vt;
    vt.v_tilde = (b.eta + b.alpha) * spd_inverse(inner);
    vt.v_tilde2 = b.k / (b.eta + b.alpha);
    return vt;
}

MomentPair gsop_regression_posterior(const RegressionSpec& model,
                                     const Vector& y, const VtildePair& vt,
                                     const Vector& mu_y) {
    const Index m = model.mu_x.size();
    const Index p = mu_y.size();
    if (model.b.rows() != p || model.b.cols() != m ||
        model.sigma_x.rows() != m || y.size() != p ||
        vt.v_tilde.rows() != p) {
        throw dimension_error("gsop_regression_posterior: dimension mismatch");
    }
    if (vt.v_tilde2.rows() != vech_size(p)) {
        throw dimension_error(
            "gsop_regression_posterior: v_tilde2 must be on vech space");
    }
    const Vector r = y - mu_y;
    const Matrix sxbt = model.sigma_x * model.b.transpose();  // m x p

    MomentPair post;
    post.mean = model.mu_x + sxbt * vt.v_tilde * r;

    const Matrix g = duplication_matrix(p);
    // r' (x) Sigma_x B' is m x p^2 with column block j equal to r_j * Sigma_x B'
    Matrix left(m, p * p);
    for (Index j = 0; j < p; ++j) {
        left.middleCols(j * p, p) = r[j] * sxbt;
    }
    const Matrix correction =
        left * g * vt.v_tilde2 * g.transpose() * left.transpose();
    post.cov = symmetrize(model.sigma_x - sxbt * vt.v_tilde * sxbt.transpose() +
                          correction);
    return post;
}

Matrix psd_projected_v(const Matrix& v, double floor_scale) {
    require_symmetric(v, "psd_projected_v");
    const double floor =
        floor_scale * std::max(v.trace() / static_cast<double>(v.rows()), 0.0);
    return psd_floor(v, floor);
}

}  // namespace pspp
