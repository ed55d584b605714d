#pragma once

#include <variant>
#include <vector>

#include "pspp/gsop.hpp"
#include "pspp/sop.hpp"

namespace pspp {

// Observation-variance modes of the state-space model y_t = B x_t + eps_t,
// x_t = C x_{t-1} + omega_t.
struct KnownV {
    Matrix v;  // Var(eps_t), known
};
struct ScalarV {
    Matrix z;  // Var(eps_t) = V * z with scalar V unknown; Var(omega) = V * w
};
struct MatrixV {};  // Var(eps_t) = V, a full p x p unknown covariance

using ObsMode = std::variant<KnownV, ScalarV, MatrixV>;

// Fixed evolution covariance W, or per-component discount factors delta
// with R_t = Delta^{-1/2} (C P C') Delta^{-1/2}.
using Evolution = std::variant<Matrix, Vector>;

struct StateSpaceSpec {
    Matrix b;  // p x m design
    Matrix c;  // m x m transition
    Evolution evolution;
    ObsMode obs;

    Index state_dim() const { return c.rows(); }
    Index obs_dim() const { return b.rows(); }
    void validate() const;
};

using VarBelief = std::variant<std::monostate, ScalarVarBelief, MatrixVarBelief>;

struct FilterState {
    Vector m;
    Matrix p_mat;
    VarBelief var_belief;
    long t = 0;
};

struct StepReport {
    Vector f;      // 1-step forecast mean
    Matrix q;      // 1-step forecast covariance
    Vector e;      // forecast error y - f
    Vector e_std;  // Q^{-1/2} e, symmetric square root
    Matrix v_hat;  // current observation-variance estimate (1x1 in scalar mode)
    Vector m;      // posterior state mean
    Matrix p_mat;  // posterior state covariance
    bool v_projected = false;  // v_hat needed PSD projection to invert
};

struct ForecastMetrics {
    Vector msse;  // mean of squared standardized errors
    Vector mse;
    Vector mae;
    Vector me;
};

// Prior-to-evolved state covariance R_t; in discount mode this equals
// C P C' + W_t with W_t = Delta^{-1/2} C P C' Delta^{-1/2} - C P C'.
Matrix evolve_cov(const FilterState& state, const StateSpaceSpec& spec);

// One step of the moment filter with scalar unknown V (spec.obs must be
// ScalarV, state.var_belief a ScalarVarBelief):
//   Q = B R B' + Z, tau = e' Q^{-1} e, eta_t V_t = eta_{t-1} V_{t-1} + tau,
//   m_t = C m + A e, P_t = R - A Q A', with X_t | y^t ~ (m_t, V_t P_t).
// The returned state carries the scale-free P_t; the report's p_mat is the
// posterior covariance V_t P_t.
std::pair<FilterState, StepReport> sop_filter_step(const FilterState& state,
                                                   const StateSpaceSpec& spec,
                                                   const Vector& y);

// One step of the moment filter with matrix unknown V (spec.obs MatrixV,
// state.var_belief a MatrixVarBelief):
//   Q_t = B R B' + V_{t-1},  eta_t V_t = eta_{t-1} V_{t-1} + e e' - B R B',
//   m_t = C m + R B' Vt e,   Vt = (B R B' + V_t)^{-1},
//   P_t = R - R B' Vt B R + (e' (x) R B') G_p (K0/eta_t) G_p' (e (x) B R).
// Q uses the pre-update estimate, Vt the post-update one.  If B R B' + V_t
// is not PD with the raw V_t, a PSD-projected copy is used for the inverse
// only and the step is flagged.
std::pair<FilterState, StepReport> pspp_dlm_step(const FilterState& state,
                                                 const StateSpaceSpec& spec,
                                                 const Vector& y);

// Standard moment recursion with known V (spec.obs KnownV).
std::pair<FilterState, StepReport> kalman_step_known_v(
    const FilterState& state, const StateSpaceSpec& spec, const Vector& y);

// e* = Q^{-1/2} e with the symmetric square root; under a well-specified
// model e* ~ (0, I).
Vector standardized_error(const Vector& e, const Matrix& q);

// Componentwise forecast-accuracy summary over reports with index >
// burn_in (0-based steps; burn_in = 0 keeps everything).
ForecastMetrics forecast_metrics(const std::vector<StepReport>& reports,
                                 std::size_t burn_in = 0);

}  // namespace pspp
