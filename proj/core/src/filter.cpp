#include "pspp/filter.hpp"

#include <cmath>
#include <string>

namespace pspp {

void StateSpaceSpec::validate() const {
    const Index m = state_dim();
    const Index p = obs_dim();
    if (m < 1 || p < 1 || b.cols() != m || c.cols() != m) {
        throw dimension_error("StateSpaceSpec: B must be p x m and C m x m");
    }
    if (const auto* w = std::get_if<Matrix>(&evolution)) {
        if (w->rows() != m || w->cols() != m) {
            throw dimension_error("StateSpaceSpec: W must be m x m");
        }
        require_symmetric(*w, "StateSpaceSpec.W");
        const double lam = min_eigenvalue(*w);
        if (lam < -1e-10 * std::max(1.0, w->cwiseAbs().maxCoeff())) {
            throw not_psd_error("StateSpaceSpec: W must be PSD", lam);
        }
    } else {
        const auto& delta = std::get<Vector>(evolution);
        if (delta.size() != m) {
            throw dimension_error("StateSpaceSpec: need one discount factor "
                                  "per state component");
        }
        for (Index i = 0; i < m; ++i) {
            if (!(delta[i] > 0.0 && delta[i] <= 1.0)) {
                throw domain_error("StateSpaceSpec: discount " +
                                   std::to_string(delta[i]) +
                                   " out of (0, 1]");
            }
        }
    }
    if (const auto* kv = std::get_if<KnownV>(&obs)) {
        if (kv->v.rows() != p || kv->v.cols() != p) {
            throw dimension_error("StateSpaceSpec: known V must be p x p");
        }
        require_symmetric(kv->v, "StateSpaceSpec.V");
    } else if (const auto* sv = std::get_if<ScalarV>(&obs)) {
        if (sv->z.rows() != p || sv->z.cols() != p) {
            throw dimension_error("StateSpaceSpec: Z must be p x p");
        }
        require_symmetric(sv->z, "StateSpaceSpec.Z");
    }
}

Matrix evolve_cov(const FilterState& state, const StateSpaceSpec& spec) {
    spec.validate();
    const Matrix cpc = symmetrize(spec.c * state.p_mat * spec.c.transpose());
    if (const auto* w = std::get_if<Matrix>(&spec.evolution)) {
        return symmetrize(cpc + *w);
    }
    const auto& delta = std::get<Vector>(spec.evolution);
    Vector inv_sqrt(delta.size());
    for (Index i = 0; i < delta.size(); ++i) {
        inv_sqrt[i] = 1.0 / std::sqrt(delta[i]);
    }
    return symmetrize(inv_sqrt.asDiagonal() * cpc * inv_sqrt.asDiagonal());
}

Vector standardized_error(const Vector& e, const Matrix& q) {
    if (e.size() != q.rows()) {
        throw dimension_error("standardized_error: dimension mismatch");
    }
    return sym_sqrt_inv(q) * e;
}

namespace {

// forecast pieces shared by every step flavour
struct Forecast {
    Matrix r;
    Vector f;
    Vector e;
};

Forecast forecast_state(const FilterState& state, const StateSpaceSpec& spec,
                        const Vector& y) {
    if (y.size() != spec.obs_dim()) {
        throw dimension_error("filter step: y has length " +
                              std::to_string(y.size()) + ", expected " +
                              std::to_string(spec.obs_dim()));
    }
    if (state.m.size() != spec.state_dim()) {
        throw dimension_error("filter step: state dimension mismatch");
    }
    Forecast fc;
    fc.r = evolve_cov(state, spec);
    fc.f = spec.b * spec.c * state.m;
    fc.e = y - fc.f;
    return fc;
}

}  // namespace

std::pair<FilterState, StepReport> sop_filter_step(const FilterState& state,
                                                   const StateSpaceSpec& spec,
                                                   const Vector& y) {
    const auto* sv = std::get_if<ScalarV>(&spec.obs);
    if (!sv) {
        throw domain_error("sop_filter_step: spec.obs must be ScalarV");
    }
    const auto* belief = std::get_if<ScalarVarBelief>(&state.var_belief);
    if (!belief) {
        throw domain_error(
            "sop_filter_step: state must carry a ScalarVarBelief");
    }
    belief->validate();

    const Forecast fc = forecast_state(state, spec, y);
    const Matrix q =
        symmetrize(spec.b * fc.r * spec.b.transpose() + sv->z);
    const Matrix q_inv = spd_inverse(q);
    const Matrix a = fc.r * spec.b.transpose() * q_inv;
    const double tau = fc.e.dot(q_inv * fc.e);

    // alpha is pinned to 1 in the sequential filter
    ScalarVarBelief post = *belief;
    post.eta = belief->eta + 1.0;
    post.v_hat = (belief->eta * belief->v_hat + tau) / post.eta;

    FilterState next;
    next.m = spec.c * state.m + a * fc.e;
    next.p_mat = symmetrize(fc.r - a * q * a.transpose());
    next.var_belief = post;
    next.t = state.t + 1;

    StepReport rep;
    rep.f = fc.f;
    rep.q = q;
    rep.e = fc.e;
    // scale-free part Q carries the known Z; the V estimate multiplies in
    rep.e_std = standardized_error(fc.e, Matrix(belief->v_hat * q));
    rep.v_hat = Matrix::Constant(1, 1, post.v_hat);
    rep.m = next.m;
    // the state carries the scale-free P_t; the posterior covariance of
    // the state vector is V_t P_t
    rep.p_mat = post.v_hat * next.p_mat;
    return {std::move(next), std::move(rep)};
}

std::pair<FilterState, StepReport> pspp_dlm_step(const FilterState& state,
                                                 const StateSpaceSpec& spec,
                                                 const Vector& y) {
    if (!std::holds_alternative<MatrixV>(spec.obs)) {
        throw domain_error("pspp_dlm_step: spec.obs must be MatrixV");
    }
    const auto* belief = std::get_if<MatrixVarBelief>(&state.var_belief);
    if (!belief) {
        throw domain_error("pspp_dlm_step: state must carry a MatrixVarBelief");
    }
    belief->validate();
    const Index p = spec.obs_dim();
    if (belief->dim() != p) {
        throw dimension_error("pspp_dlm_step: belief dimension mismatch");
    }

    const Forecast fc = forecast_state(state, spec, y);
    const Matrix brb = symmetrize(spec.b * fc.r * spec.b.transpose());
    const Matrix q = symmetrize(brb + belief->v_hat);
    if (min_eigenvalue(q) <= 0.0) {
        throw singular_error(
            "pspp_dlm_step: forecast covariance Q is not positive definite",
            std::numeric_limits<double>::infinity());
    }

    // alpha = 1: eta_t V_t = eta_{t-1} V_{t-1} + e e' - B R B'
    MatrixVarBelief post = *belief;
    post.eta = belief->eta + 1.0;
    post.v_hat = symmetrize(
        belief->v_hat +
        (fc.e * fc.e.transpose() - q) / post.eta);

    Matrix to_invert = symmetrize(brb + post.v_hat);
    bool projected = false;
    if (min_eigenvalue(to_invert) <= 0.0) {
        to_invert = symmetrize(brb + psd_projected_v(post.v_hat));
        projected = true;
        const double lam = min_eigenvalue(to_invert);
        if (lam <= 0.0) {
            throw singular_error(
                "pspp_dlm_step: B R B' + V_t not positive definite even "
                "after PSD projection (eigenvalue " +
                    std::to_string(lam) + ")",
                std::numeric_limits<double>::infinity());
        }
    }
    const Matrix v_tilde = spd_inverse(to_invert);
    const Matrix v_tilde2 = post.k / post.eta;

    const Matrix rbt = fc.r * spec.b.transpose();  // m x p
    const Matrix g = duplication_matrix(p);
    const Index m_dim = spec.state_dim();
    Matrix left(m_dim, p * p);  // e' (x) R B'
    for (Index j = 0; j < p; ++j) {
        left.middleCols(j * p, p) = fc.e[j] * rbt;
    }

    FilterState next;
    next.m = spec.c * state.m + rbt * v_tilde * fc.e;
    next.p_mat = symmetrize(fc.r - rbt * v_tilde * rbt.transpose() +
                            left * g * v_tilde2 * g.transpose() *
                                left.transpose());
    next.var_belief = post;
    next.t = state.t + 1;

    StepReport rep;
    rep.f = fc.f;
    rep.q = q;
    rep.e = fc.e;
    rep.e_std = standardized_error(fc.e, q);
    rep.v_hat = post.v_hat;
    rep.m = next.m;
    rep.p_mat = next.p_mat;
    rep.v_projected = projected;
    return {std::move(next), std::move(rep)};
}

std::pair<FilterState, StepReport> kalman_step_known_v(
    const FilterState& state, const StateSpaceSpec& spec, const Vector& y) {
    const auto* kv = std::get_if<KnownV>(&spec.obs);
    if (!kv) {
        throw domain_error("kalman_step_known_v: spec.obs must be KnownV");
    }
    const Forecast fc = forecast_state(state, spec, y);
    const Matrix q =
        symmetrize(spec.b * fc.r * spec.b.transpose() + kv->v);
    const Matrix q_inv = spd_inverse(q);
    const Matrix a = fc.r * spec.b.transpose() * q_inv;

    FilterState next;
    next.m = spec.c * state.m + a * fc.e;
    next.p_mat = symmetrize(fc.r - a * q * a.transpose());
    next.var_belief = state.var_belief;
    next.t = state.t + 1;

    StepReport rep;
    rep.f = fc.f;
    rep.q = q;
    rep.e = fc.e;
    rep.e_std = standardized_error(fc.e, q);
    rep.v_hat = kv->v;
    rep.m = next.m;
    rep.p_mat = next.p_mat;
    return {std::move(next), std::move(rep)};
}

ForecastMetrics forecast_metrics(const std::vector<StepReport>& reports,
                                 std::size_t burn_in) {
    if (reports.size() <= burn_in) {
        throw domain_error("forecast_metrics: no reports past burn-in");
    }
    const Index p = reports.front().e.size();
    ForecastMetrics fm;
    fm.msse = Vector::Zero(p);
    fm.mse = Vector::Zero(p);
    fm.mae = Vector::Zero(p);
    fm.me = Vector::Zero(p);
    const double n = static_cast<double>(reports.size() - burn_in);
    for (std::size_t t = burn_in; t < reports.size(); ++t) {
        const auto& r = reports[t];
        fm.msse += r.e_std.cwiseProduct(r.e_std);
        fm.mse += r.e.cwiseProduct(r.e);
        fm.mae += r.e.cwiseAbs();
        fm.me += r.e;
    }
    fm.msse /= n;
    fm.mse /= n;
    fm.mae /= n;
    fm.me /= n;
    return fm;
}

}  // namespace pspp
