#include "pspp/postulates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pspp {

Matrix TJointSpec::stacked_scale() const {
    const Index m = dim_x();
    const Index p = dim_y();
    Matrix c(m + p, m + p);
    c.topLeftCorner(m, m) = c11;
    c.topRightCorner(m, p) = c12;
    c.bottomLeftCorner(p, m) = c12.transpose();
    c.bottomRightCorner(p, p) = c22;
    return c;
}

void TJointSpec::validate() const {
    if (n <= 0.0) throw domain_error("TJointSpec: dof must be positive");
    const Index m = dim_x();
    const Index p = dim_y();
    if (m < 1 || p < 1 || c11.rows() != m || c11.cols() != m ||
        c22.rows() != p || c22.cols() != p || c12.rows() != m ||
        c12.cols() != p) {
        throw dimension_error("TJointSpec: inconsistent block dimensions");
    }
    require_symmetric(c11, "TJointSpec.c11");
    require_symmetric(c22, "TJointSpec.c22");
    const double lam = min_eigenvalue(stacked_scale());
    if (lam < -1e-10 * std::max(1.0, stacked_scale().cwiseAbs().maxCoeff())) {
        throw not_psd_error("TJointSpec: stacked scale matrix is not PSD", lam);
    }
}

void WishartSpec::validate() const {
    if (n <= 0.0) throw domain_error("WishartSpec: dof must be positive");
    if (s.rows() != 2 || s.cols() != 2) {
        throw dimension_error("WishartSpec: S must be 2x2");
    }
    require_symmetric(s, "WishartSpec.s");
    const double lam = min_eigenvalue(s);
    if (lam <= 0.0) {
        throw not_psd_error("WishartSpec: S must be positive definite", lam);
    }
}

namespace {

// distinct error for the n in (0, 2] band, where means exist but
// variances do not
void require_variance_dof(double n) {
    if (n <= 0.0) throw domain_error("dof must be positive");
    if (n <= 2.0) {
        throw domain_error("dof " + std::to_string(n) +
                           " is in (0, 2]: conditional variance does not exist");
    }
}

}  // namespace

StudentConditional student_t_conditional_moments(const TJointSpec& spec,
                                                 const Vector& y) {
    spec.validate();
    require_variance_dof(spec.n);
    if (y.size() != spec.dim_y()) {
        throw dimension_error("student_t_conditional_moments: y dimension");
    }
    const Matrix a = regression_matrix(spec.c12, spec.c22);
    const double q = quad_form_inv(spec.c22, y - spec.mu_y);
    const double p = static_cast<double>(spec.dim_y());

    StudentConditional out;
    out.factor = 1.0 + q / spec.n;
    out.dof = spec.n + p;
    out.scale = symmetrize((spec.c11 - a * spec.c22 * a.transpose()) * out.factor);
    out.moments.mean = spec.mu_x - a * spec.mu_y;
    out.moments.cov = out.scale * (out.dof / (out.dof - 2.0));
    return out;
}

InvertedTConditional inverted_t_conditional_moments(const TJointSpec& spec,
                                                    const Vector& y) {
    spec.validate();
    if (y.size() != spec.dim_y()) {
        throw dimension_error("inverted_t_conditional_moments: y dimension");
    }
    const double q = quad_form_inv(spec.c22, y - spec.mu_y);
    if (q >= spec.n) {
        throw domain_error(
            "inverted_t_conditional_moments: quadratic form " +
            std::to_string(q) + " is outside the support bound n = " +
            std::to_string(spec.n));
    }
    const Matrix a = regression_matrix(spec.c12, spec.c22);

    InvertedTConditional out;
    out.factor = 1.0 - q / spec.n;
    out.dof = spec.n;
    out.location = spec.mu_x - a * spec.mu_y;
    out.scale = symmetrize((spec.c11 - a * spec.c22 * a.transpose()) * out.factor);
    return out;
}

Vector sample_inverted_t(double n, const Vector& mu, const Matrix& c,
                         Rng& rng) {
    if (n <= 0.0) throw domain_error("sample_inverted_t: dof must be positive");
    const Index p = mu.size();
    if (c.rows() != p || c.cols() != p) {
        throw dimension_error("sample_inverted_t: C dimension mismatch");
    }
    const Matrix c_half = sym_sqrt(c);
    const Vector z = rng.normal_vector(p);
    const Matrix sigma =
        wishart(n + static_cast<double>(p) - 1.0, Matrix::Identity(p, p), rng);
    const Matrix inner_inv_half = sym_sqrt_inv(
        symmetrize(sigma + z * z.transpose()));
    return std::sqrt(n) * c_half * inner_inv_half * z + mu;
}

WishartPartitionReport wishart_partition_moments(const WishartSpec& spec,
                                                 double y) {
    spec.validate();
    if (y <= 0.0) {
        throw domain_error("wishart_partition_moments: y must be positive");
    }
    const double s11 = spec.s(0, 0);
    const double s12 = spec.s(0, 1);
    const double s22 = spec.s(1, 1);

    WishartPartitionReport out;
    out.prior_mean = spec.n * Vector{{s12, s22}};
    out.prior_cov = spec.n * Matrix{{s11 * s22 + s12 * s12, 2.0 * s12 * s22},
                                    {2.0 * s12 * s22, 2.0 * s22 * s22}};
    out.a_xy = s12 / s22;
    out.resid_mean = 0.0;
    out.resid_var = spec.n * (s11 * s22 - s12 * s12);
    out.cond_mean = s12 * y / s22;
    out.cond_var = (s11 - s12 * s12 / s22) * y;
    return out;
}

std::pair<Vector, Vector> sample_t_joint(const TJointSpec& spec, Rng& rng) {
    const Index m = spec.dim_x();
    const Vector z =
        multivariate_t(spec.n,
                       (Vector(m + spec.dim_y()) << spec.mu_x, spec.mu_y).finished(),
                       spec.stacked_scale(), rng);
    return {z.head(m), z.tail(spec.dim_y())};
}

IndependenceReport mc_second_order_check(const JointSampler& sampler,
                                         const Matrix& a_xy, int bins,
                                         int draws, Rng& rng) {
    if (bins < 2) {
        throw domain_error("mc_second_order_check: need at least 2 bins");
    }
    if (draws < 1000 * bins) {
        throw domain_error("mc_second_order_check: need at least 1000 draws "
                           "per bin (" +
                           std::to_string(1000 * bins) + " total)");
    }

    std::vector<Vector> resid(draws);
    std::vector<Vector> ys(draws);
    Index p = 0;
    for (int i = 0; i < draws; ++i) {
        auto [x, y] = sampler(rng);
        if (i == 0) {
            p = y.size();
            if (a_xy.cols() != p || a_xy.rows() != x.size()) {
                throw dimension_error("mc_second_order_check: A_xy dimensions "
                                      "do not match sampler output");
            }
        }
        resid[i] = x - a_xy * y;
        ys[i] = std::move(y);
    }

    // empirical Mahalanobis distance of y from its sample mean; the
    // closed-form factors of the heavy-tailed laws depend on y only
    // through it
    Vector y_mean = Vector::Zero(p);
    for (const auto& y : ys) y_mean += y;
    y_mean /= draws;
    Matrix y_cov = Matrix::Zero(p, p);
    for (const auto& y : ys) {
        const Vector d = y - y_mean;
        y_cov += d * d.transpose();
    }
    y_cov = symmetrize(y_cov / (draws - 1));
    const Matrix y_cov_inv = spd_inverse(y_cov);

    std::vector<int> order(draws);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> maha(draws);
    for (int i = 0; i < draws; ++i) {
        const Vector d = ys[i] - y_mean;
        maha[i] = d.dot(y_cov_inv * d);
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return maha[a] < maha[b]; });

    const Index m = resid[0].size();
    Vector pooled_mean = Vector::Zero(m);
    for (const auto& r : resid) pooled_mean += r;
    pooled_mean /= draws;
    Matrix pooled_cov = Matrix::Zero(m, m);
    for (const auto& r : resid) {
        const Vector d = r - pooled_mean;
        pooled_cov += d * d.transpose();
    }
    pooled_cov = symmetrize(pooled_cov / (draws - 1));

    IndependenceReport rep;
    rep.bin_means.reserve(bins);
    rep.bin_covs.reserve(bins);
    rep.bin_counts.reserve(bins);

    Vector pooled_sd(m);
    for (Index i = 0; i < m; ++i) {
        pooled_sd[i] = std::sqrt(std::max(pooled_cov(i, i), 1e-300));
    }

    std::size_t min_count = static_cast<std::size_t>(draws);
    for (int b = 0; b < bins; ++b) {
        const int lo = static_cast<int>(static_cast<long long>(draws) * b / bins);
        const int hi =
            static_cast<int>(static_cast<long long>(draws) * (b + 1) / bins);
        const int count = hi - lo;
        if (count == 0) {
            throw domain_error("mc_second_order_check: empty bin");
        }
        Vector bm = Vector::Zero(m);
        for (int i = lo; i < hi; ++i) bm += resid[order[i]];
        bm /= count;
        Matrix bc = Matrix::Zero(m, m);
        for (int i = lo; i < hi; ++i) {
            const Vector d = resid[order[i]] - bm;
            bc += d * d.transpose();
        }
        bc = symmetrize(bc / std::max(count - 1, 1));

        for (Index i = 0; i < m; ++i) {
            rep.max_mean_dev =
                std::max(rep.max_mean_dev,
                         std::abs(bm[i] - pooled_mean[i]) / pooled_sd[i]);
            for (Index j = i; j < m; ++j) {
                rep.max_cov_dev = std::max(
                    rep.max_cov_dev, std::abs(bc(i, j) - pooled_cov(i, j)) /
                                         (pooled_sd[i] * pooled_sd[j]));
            }
        }
        rep.bin_means.push_back(std::move(bm));
        rep.bin_covs.push_back(std::move(bc));
        rep.bin_counts.push_back(static_cast<std::size_t>(count));
        min_count = std::min(min_count, static_cast<std::size_t>(count));
    }

    rep.mean_se = 1.0 / std::sqrt(static_cast<double>(min_count));
    rep.cov_se = std::sqrt(2.0 / static_cast<double>(min_count));
    return rep;
}

}  // namespace pspp
