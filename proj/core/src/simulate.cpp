#include "pspp/simulate.hpp"

#include <cmath>

#include "pspp/samplers.hpp"

namespace pspp {

namespace {
constexpr double kRotationAngle = 3.14159265358979323846 / 6.0;
}

const char* family_name(Family f) {
    switch (f) {
        case Family::LL: return "LL";
        case Family::LT: return "LT";
        case Family::LS: return "LS";
    }
    return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
    if (name == "LL" || name == "ll") return Family::LL;
    if (name == "LT" || name == "lt") return Family::LT;
    if (name == "LS" || name == "ls") return Family::LS;
    return std::nullopt;
}

Index family_state_dim(Family f) { return f == Family::LS ? 3 : 2; }

Matrix family_design(Family f) {
    if (f == Family::LS) {
        Matrix b = Matrix::Zero(2, 3);
        b(0, 0) = 1.0;
        b(1, 1) = 1.0;
        return b;
    }
    return Matrix::Identity(2, 2);
}

Matrix family_transition(Family f) {
    switch (f) {
        case Family::LL:
            return Matrix::Identity(2, 2);
        case Family::LT:
            return Matrix{{1.0, 1.0}, {0.0, 1.0}};
        case Family::LS: {
            Matrix c = Matrix::Identity(3, 3);
            c(1, 1) = std::cos(kRotationAngle);
            c(1, 2) = std::sin(kRotationAngle);
            c(2, 1) = -std::sin(kRotationAngle);
            c(2, 2) = std::cos(kRotationAngle);
            return c;
        }
    }
    throw domain_error("unknown family");
}

SimSpec::SimSpec()
    : v_true(Matrix{{1.0, 2.0}, {2.0, 5.0}}),
      w_true(Matrix::Identity(2, 2)) {}

void SimSpec::validate() const {
    if (length < 1) throw domain_error("SimSpec: length must be >= 1");
    if (n_series < 1) throw domain_error("SimSpec: n_series must be >= 1");
    if (v_true.rows() != 2 || v_true.cols() != 2) {
        throw dimension_error("SimSpec: v_true must be 2x2");
    }
    require_symmetric(v_true, "SimSpec.v_true");
    if (min_eigenvalue(v_true) <= 0.0) {
        throw not_psd_error("SimSpec: v_true must be positive definite",
                            min_eigenvalue(v_true));
    }
    const Index d = family_state_dim(family);
    if (w_true.rows() != d || w_true.cols() != d) {
        throw dimension_error("SimSpec: w_true must match the family state "
                              "dimension");
    }
    require_symmetric(w_true, "SimSpec.w_true");
}

SimSpec SimSpec::normalized() const {
    SimSpec s = *this;
    const Index d = family_state_dim(family);
    if (s.w_true.rows() != d && s.w_true.isIdentity(1e-14)) {
        s.w_true = Matrix::Identity(d, d);
    }
    return s;
}

std::vector<Vector> simulate_series(const SimSpec& spec, int index) {
    const SimSpec s = spec.normalized();
    s.validate();
    const Index d = family_state_dim(s.family);

    const Matrix b = family_design(s.family);
    const Matrix c = family_transition(s.family);
    const Matrix w_factor = sampling_factor(s.w_true);
    const Matrix v_factor = sampling_factor(s.v_true);

    Rng rng = Rng::stream(s.seed, static_cast<std::uint64_t>(index));
    Vector x = rng.normal_vector(d);  // X_0 ~ N(0, I)

    std::vector<Vector> ys;
    ys.reserve(static_cast<std::size_t>(s.length));
    for (int t = 0; t < s.length; ++t) {
        x = c * x + w_factor * rng.normal_vector(d);
        ys.push_back(b * x + v_factor * rng.normal_vector(2));
    }
    return ys;
}

ExperimentPriors ExperimentPriors::defaults(Index state_dim, Index obs_dim) {
    // eta0 must be large enough that the first revisions
    // V_1 = V_0 + (e e' - Q_1)/(eta0 + 1) cannot leave V_1 so indefinite
    // that B R B' + V_1 loses definiteness, and K0 must be small on the
    // scale of the inverse forecast covariance or the correction term
    // feeds back into P_t and diverges.
    ExperimentPriors pr;
    pr.m0 = Vector::Zero(state_dim);
    pr.p0 = Matrix::Identity(state_dim, state_dim);
    pr.v_hat0 = Matrix::Identity(obs_dim, obs_dim);
    pr.eta0 = 8.0;
    pr.k0 =
        1e-3 * Matrix::Identity(vech_size(obs_dim), vech_size(obs_dim));
    return pr;
}

ExperimentResult run_experiment(const SimSpec& raw_spec,
                                const std::set<ModelKind>& models,
                                const std::vector<int>& snapshot_times,
                                const ExperimentPriors* priors) {
    const SimSpec spec = raw_spec.normalized();
    spec.validate();
    if (models.empty()) {
        throw domain_error("run_experiment: no models requested");
    }
    for (int t : snapshot_times) {
        if (t < 1 || t > spec.length) {
            throw domain_error("run_experiment: snapshot time " +
                               std::to_string(t) + " outside run length");
        }
    }

    const Index d = family_state_dim(spec.family);
    const ExperimentPriors pr =
        priors ? *priors : ExperimentPriors::defaults(d, 2);

    StateSpaceSpec dlm1_spec;
    dlm1_spec.b = family_design(spec.family);
    dlm1_spec.c = family_transition(spec.family);
    dlm1_spec.evolution = spec.w_true;
    dlm1_spec.obs = MatrixV{};

    StateSpaceSpec dlm3_spec = dlm1_spec;
    dlm3_spec.obs = KnownV{spec.v_true};

    const bool want1 = models.count(ModelKind::DLM1) > 0;
    const bool want3 = models.count(ModelKind::DLM3) > 0;

    ExperimentResult out;
    out.family = spec.family;
    out.seed = spec.seed;
    out.v_true_entries =
        Vector{{spec.v_true(0, 0), spec.v_true(0, 1), spec.v_true(1, 1)}};
    out.snapshot_times = snapshot_times;

    ForecastMetrics acc1, acc3;
    std::vector<Vector> snap_sum(snapshot_times.size(), Vector::Zero(3));
    std::vector<Vector> snap_sumsq(snapshot_times.size(), Vector::Zero(3));

    auto add = [](ForecastMetrics& acc, const ForecastMetrics& fm) {
        if (acc.msse.size() == 0) {
            acc = fm;
        } else {
            acc.msse += fm.msse;
            acc.mse += fm.mse;
            acc.mae += fm.mae;
            acc.me += fm.me;
        }
    };

    for (int rep = 0; rep < spec.n_series; ++rep) {
        const std::vector<Vector> ys = simulate_series(spec, rep);
        try {
            ForecastMetrics fm1, fm3;
            std::vector<Vector> snaps(snapshot_times.size());
            if (want1) {
                FilterState st;
                st.m = pr.m0;
                st.p_mat = pr.p0;
                MatrixVarBelief belief;
                belief.v_hat = pr.v_hat0;
                belief.k = pr.k0;
                belief.eta = pr.eta0;
                belief.alpha = 1.0;
                st.var_belief = belief;

                std::vector<StepReport> reports;
                reports.reserve(ys.size());
                for (const auto& y : ys) {
                    auto [next, rep_t] = pspp_dlm_step(st, dlm1_spec, y);
                    st = std::move(next);
                    reports.push_back(std::move(rep_t));
                    for (std::size_t si = 0; si < snapshot_times.size(); ++si) {
                        if (st.t == snapshot_times[si]) {
                            const Matrix& vh = reports.back().v_hat;
                            snaps[si] = Vector{{vh(0, 0), vh(0, 1), vh(1, 1)}};
                        }
                    }
                }
                fm1 = forecast_metrics(reports);
            }
            if (want3) {
                FilterState st;
                st.m = pr.m0;
                st.p_mat = pr.p0;
                std::vector<StepReport> reports;
                reports.reserve(ys.size());
                for (const auto& y : ys) {
                    auto [next, rep_t] = kalman_step_known_v(st, dlm3_spec, y);
                    st = std::move(next);
                    reports.push_back(std::move(rep_t));
                }
                fm3 = forecast_metrics(reports);
            }
            // commit only after the whole replication succeeded
            if (want1) {
                add(acc1, fm1);
                for (std::size_t si = 0; si < snapshot_times.size(); ++si) {
                    snap_sum[si] += snaps[si];
                    snap_sumsq[si] += snaps[si].cwiseProduct(snaps[si]);
                }
            }
            if (want3) add(acc3, fm3);
            ++out.replications;
        } catch (const error& e) {
            ++out.failed;
            if (out.first_error.empty()) out.first_error = e.what();
        }
    }

    if (out.replications == 0) {
        throw domain_error("run_experiment: every replication failed: " +
                           out.first_error);
    }
    const double n = static_cast<double>(out.replications);
    auto finish = [n](ForecastMetrics& acc) {
        acc.msse /= n;
        acc.mse /= n;
        acc.mae /= n;
        acc.me /= n;
    };
    if (want1) {
        finish(acc1);
        out.dlm1 = acc1;
        out.vhat_mean.resize(snapshot_times.size());
        out.vhat_sd.resize(snapshot_times.size());
        for (std::size_t si = 0; si < snapshot_times.size(); ++si) {
            out.vhat_mean[si] = snap_sum[si] / n;
            Vector var = snap_sumsq[si] / n -
                         out.vhat_mean[si].cwiseProduct(out.vhat_mean[si]);
            out.vhat_sd[si] = var.cwiseMax(0.0).cwiseSqrt();
        }
    }
    if (want3) {
        finish(acc3);
        out.dlm3 = acc3;
    }
    return out;
}

TableReport aggregate_tables(const std::vector<ExperimentResult>& results) {
    TableReport table;
    const Family all[] = {Family::LL, Family::LT, Family::LS};
    for (Family f : all) {
        const ExperimentResult* res = nullptr;
        for (const auto& r : results) {
            if (r.family == f) res = &r;
        }
        if (!res) {
            table.missing.push_back(f);
            continue;
        }
        if (res->dlm1) {
            table.metric_rows.push_back({f, ModelKind::DLM1, *res->dlm1});
        }
        if (res->dlm3) {
            table.metric_rows.push_back({f, ModelKind::DLM3, *res->dlm3});
        }
        if (res->dlm1 && !res->snapshot_times.empty()) {
            const char* labels[] = {"V11", "V12", "V22"};
            for (int entry = 0; entry < 3; ++entry) {
                SnapshotRow row;
                row.family = f;
                row.entry = labels[entry];
                row.truth = res->v_true_entries[entry];
                row.times = res->snapshot_times;
                for (std::size_t si = 0; si < res->snapshot_times.size(); ++si) {
                    row.estimates.push_back(res->vhat_mean[si][entry]);
                }
                table.snapshot_rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

}  // namespace pspp
