#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <pspp/conditioning.hpp>
#include <pspp/gsop.hpp>
#include <pspp/samplers.hpp>

using namespace pspp;

namespace {

Matrix random_spd(Index p, Rng& rng, double ridge = 0.5) {
    Matrix a(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    return symmetrize(a * a.transpose() + ridge * Matrix::Identity(p, p));
}

MatrixVarBelief belief2(double eta, double alpha = 1.0) {
    MatrixVarBelief b;
    b.v_hat = Matrix::Identity(2, 2);
    b.k = Matrix::Identity(3, 3);
    b.eta = eta;
    b.alpha = alpha;
    return b;
}

}  // namespace

TEST_CASE("gsop_tau") {
    const Vector mu{{0.5, -1.0}};
    Rng rng(51);
    const Matrix sigma = random_spd(2, rng);
    CHECK((gsop_tau(mu, sigma, mu) + sigma).cwiseAbs().maxCoeff() < 1e-14);

    const Vector y = mu + Vector{{1.0, 2.0}};
    const Matrix tau = gsop_tau(mu, Matrix::Zero(2, 2), y);
    const Matrix expect{{1.0, 2.0}, {2.0, 4.0}};
    CHECK((tau - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gsop_tau is unbiased for V under the additive-variance model") {
    Rng rng(52);
    const Vector mu{{0.3, -0.6}};
    const Matrix sigma_y = random_spd(2, rng);
    const Matrix v = random_spd(2, rng);
    const Matrix factor = sampling_factor(symmetrize(sigma_y + v));

    const int draws = 200000;
    Matrix acc = Matrix::Zero(2, 2);
    Matrix acc_sq = Matrix::Zero(2, 2);
    for (int i = 0; i < draws; ++i) {
        const Matrix tau = gsop_tau(mu, sigma_y, mvnormal(mu, factor, rng));
        acc += tau;
        acc_sq += tau.cwiseProduct(tau);
    }
    acc /= draws;
    acc_sq /= draws;
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) {
            const double se = std::sqrt(
                (acc_sq(i, j) - acc(i, j) * acc(i, j)) / draws);
            CHECK(std::abs(acc(i, j) - v(i, j)) < 4.0 * se);
        }
    }
}

TEST_CASE("gsop_v_update") {
    const Matrix tau{{3.0, 2.0}, {2.0, 7.0}};
    const auto post = gsop_v_update(belief2(1.0), tau);
    const Matrix expect{{2.0, 1.0}, {1.0, 4.0}};
    CHECK((post.mean() - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((post.cov_vech() - Matrix::Identity(3, 3) / 2.0)
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    const auto fixed = gsop_v_update(belief2(4.0), Matrix::Identity(2, 2));
    CHECK((fixed.mean() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);
}

TEST_CASE("iterated updates concentrate on the repeated observation") {
    const Matrix target{{2.0, -0.5}, {-0.5, 3.0}};
    MatrixVarBelief b = belief2(1.0);
    const double eta0 = b.eta;
    const Matrix v0 = b.v_hat;
    for (int t = 1; t <= 300; ++t) {
        b = gsop_v_update(b, target);
        const Matrix closed = (eta0 * v0 + t * target) / (eta0 + t);
        CHECK((b.mean() - closed).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK((b.mean() - target).cwiseAbs().maxCoeff() < 0.02);
    CHECK(b.cov_vech().cwiseAbs().maxCoeff() < 0.005);
}

TEST_CASE("gsop_v_update is linear in tau; spread independent of tau") {
    Rng rng(53);
    for (double alpha : {1.0, 2.5}) {
        const MatrixVarBelief b = belief2(3.0, alpha);
        const Matrix t1 = random_spd(2, rng);
        const Matrix t2 = random_spd(2, rng);
        const auto p1 = gsop_v_update(b, t1);
        const auto p2 = gsop_v_update(b, t2);
        // coefficient on tau is alpha/(eta+alpha)
        const Matrix diff = p1.mean() - p2.mean();
        const Matrix expected = (b.alpha / (b.eta + b.alpha)) * (t1 - t2);
        CHECK((diff - expected).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((p1.cov_vech() - p2.cov_vech()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((p1.cov_vech() - b.k / (b.eta + alpha)).cwiseAbs().maxCoeff() <
              1e-14);
    }
}

TEST_CASE("fixed-A posterior") {
    SUBCASE("A = 0 returns the prior") {
        Rng rng(54);
        GsopJoint j;
        j.mu_x = Vector{{0.7}};
        j.mu_y = Vector{{-0.1, 0.4}};
        j.sigma_x = Matrix::Constant(1, 1, 2.0);
        j.sigma_y = random_spd(2, rng);
        j.a = Matrix::Zero(1, 2);
        const auto post =
            gsop_posterior_fixed_a(j, Vector{{1.0, 1.0}}, belief2(2.0));
        CHECK(post.mean[0] == doctest::Approx(0.7));
        CHECK(post.cov(0, 0) == doctest::Approx(2.0));
    }
    SUBCASE("scalar direct substitution") {
        GsopJoint j;
        j.mu_x = Vector{{0.2}};
        j.mu_y = Vector{{0.0}};
        j.sigma_x = Matrix::Constant(1, 1, 3.0);
        j.sigma_y = Matrix::Constant(1, 1, 1.0);
        j.a = Matrix::Constant(1, 1, 1.0);
        MatrixVarBelief b;
        b.v_hat = Matrix::Constant(1, 1, 1.0);
        b.k = Matrix::Constant(1, 1, 1.0);
        b.eta = 3.0;
        b.alpha = 1.0;
        const auto post = gsop_posterior_fixed_a(j, Vector{{2.0}}, b);
        // tau = 4 - 1 = 3; cov = 3 - (1 + 3 + 3)/4 = 1.25
        CHECK(post.mean[0] == doctest::Approx(2.2).epsilon(1e-14));
        CHECK(post.cov(0, 0) == doctest::Approx(1.25).epsilon(1e-14));
    }
    SUBCASE("degenerate-V limit agrees with direct moment conditioning") {
        // with eta huge and K = 0 the posterior treats V as known at v0;
        // the formula's limiting covariance is Sigma_x - A v0 A', i.e.
        // conditioning on a joint whose Var(Y) carries v0
        Rng rng(55);
        const Matrix v0 = random_spd(2, rng);
        GsopJoint j;
        j.mu_x = rng.normal_vector(2);
        j.mu_y = rng.normal_vector(2);
        j.sigma_x = random_spd(2, rng, 3.0);
        j.sigma_y = random_spd(2, rng, 0.2);
        j.a = Matrix{{0.4, -0.1}, {0.2, 0.3}};

        MatrixVarBelief b;
        b.v_hat = v0;
        b.k = Matrix::Zero(3, 3);
        b.eta = 1e9;
        b.alpha = 1.0;
        const Vector y = j.mu_y + rng.normal_vector(2);
        const auto post = gsop_posterior_fixed_a(j, y, b);

        JointMoments oracle;
        oracle.mu_x = j.mu_x;
        oracle.mu_y = j.mu_y;
        oracle.sigma_x = j.sigma_x;
        oracle.sigma_y = v0;
        oracle.cov_xy = j.a * v0;
        const auto cond = pspp1_condition(oracle, y);
        CHECK((post.mean - cond.mean).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((post.cov - cond.cov).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("vtilde pair") {
    SUBCASE("posterior V mean of identity halves the inverse") {
        const auto vt = vtilde_pair(Matrix::Identity(2, 2), belief2(2.0),
                                    Matrix::Identity(2, 2));
        CHECK((vt.v_tilde - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((vt.v_tilde2 - Matrix::Identity(3, 3) / 3.0)
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
    }
    SUBCASE("large-eta limit and the algebraic identity") {
        Rng rng(56);
        const Matrix sigma_y = random_spd(2, rng);
        const Matrix tau = random_spd(2, rng);
        MatrixVarBelief b = belief2(1e8);
        b.v_hat = random_spd(2, rng);
        const auto vt = vtilde_pair(sigma_y, b, tau);
        const Matrix limit = spd_inverse(symmetrize(sigma_y + b.v_hat));
        CHECK((vt.v_tilde - limit).cwiseAbs().maxCoeff() < 1e-6);

        // exact identity at any eta: v_tilde = {Sigma_y + E(V|tau)}^{-1}
        MatrixVarBelief b2 = belief2(3.5, 1.0);
        b2.v_hat = random_spd(2, rng);
        const auto vt2 = vtilde_pair(sigma_y, b2, tau);
        const Matrix post_mean = gsop_v_update(b2, tau).mean();
        const Matrix identity_route =
            spd_inverse(symmetrize(sigma_y + post_mean));
        CHECK((vt2.v_tilde - identity_route).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("v_tilde2 vanishes as eta grows with K fixed") {
        const auto big = vtilde_pair(Matrix::Identity(2, 2), belief2(1e6),
                                     Matrix::Identity(2, 2));
        CHECK(big.v_tilde2.cwiseAbs().maxCoeff() < 2e-6);
    }
    SUBCASE("non-PD inner matrix fails with the offending eigenvalue named") {
        MatrixVarBelief b = belief2(1.0);
        b.v_hat = Matrix{{-4.0, 0.0}, {0.0, -4.0}};
        CHECK_THROWS_AS(vtilde_pair(Matrix::Identity(2, 2) * 0.1, b,
                                    Matrix::Zero(2, 2)),
                        singular_error);
    }
    SUBCASE("Wishart inverse-moment gap justifies the plug-in at rate "
            "n/(n-p-1) - 1") {
        // E(M^{-1}) = S^{-1}/(n - p - 1) while {E(M)}^{-1} = S^{-1}/n
        Rng rng(57);
        const double n = 100.0;
        const Index p = 2;
        const Matrix s = random_spd(p, rng);
        const double stated_gap = n / (n - static_cast<double>(p) - 1.0) - 1.0;

        Matrix acc = Matrix::Zero(p, p);
        const int draws = 20000;
        for (int i = 0; i < draws; ++i) {
            acc += spd_inverse(wishart(n, s, rng));
        }
        acc /= draws;
        const Matrix mean_inverse_exact = spd_inverse(s) / (n - p - 1.0);
        CHECK((acc - mean_inverse_exact).cwiseAbs().maxCoeff() /
                  mean_inverse_exact.cwiseAbs().maxCoeff() <
              0.05);

        const Matrix inv_of_mean = spd_inverse(Matrix(n * s));
        const Matrix ratio = mean_inverse_exact * spd_inverse(inv_of_mean);
        CHECK((ratio - (1.0 + stated_gap) * Matrix::Identity(p, p))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("regression posterior") {
    SUBCASE("direct substitution, Kronecker term vanishing") {
        RegressionSpec model;
        model.b = Matrix::Identity(2, 2);
        model.mu_x = Vector::Zero(2);
        model.sigma_x = Matrix::Identity(2, 2);
        VtildePair vt;
        vt.v_tilde = 0.5 * Matrix::Identity(2, 2);
        vt.v_tilde2 = Matrix::Zero(3, 3);
        const auto post = gsop_regression_posterior(model, Vector{{1.0, 1.0}},
                                                    vt, Vector::Zero(2));
        CHECK((post.mean - Vector{{0.5, 0.5}}).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((post.cov - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
              1e-14);
    }
    SUBCASE("zero residual removes the correction term") {
        Rng rng(58);
        RegressionSpec model;
        model.b = Matrix{{1.0, 0.2, -0.4}, {0.0, 1.1, 0.3}};
        model.mu_x = rng.normal_vector(3);
        model.sigma_x = random_spd(3, rng);
        const Vector mu_y = rng.normal_vector(2);
        VtildePair vt;
        vt.v_tilde = random_spd(2, rng);
        vt.v_tilde2 = random_spd(3, rng);
        const auto post = gsop_regression_posterior(model, mu_y, vt, mu_y);
        const Matrix base =
            model.sigma_x - model.sigma_x * model.b.transpose() * vt.v_tilde *
                                model.b * model.sigma_x;
        CHECK((post.cov - base).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((post.mean - model.mu_x).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("Kronecker correction equals the four-index summation oracle") {
        Rng rng(59);
        for (int trial = 0; trial < 100; ++trial) {
            const Index p = 2, m = 3;
            RegressionSpec model;
            model.b = Matrix(p, m);
            for (Index i = 0; i < p; ++i) {
                for (Index j = 0; j < m; ++j) model.b(i, j) = rng.normal();
            }
            model.mu_x = rng.normal_vector(m);
            model.sigma_x = random_spd(m, rng);
            const Vector mu_y = rng.normal_vector(p);
            const Vector y = mu_y + rng.normal_vector(p);
            VtildePair vt;
            vt.v_tilde = random_spd(p, rng);
            vt.v_tilde2 = random_spd(vech_size(p), rng);

            const auto post = gsop_regression_posterior(model, y, vt, mu_y);
            const Matrix base =
                model.sigma_x - model.sigma_x * model.b.transpose() *
                                    vt.v_tilde * model.b * model.sigma_x;
            const Matrix correction = post.cov - base;

            // brute force over the vec/vech index maps
            auto vech_idx = [p](Index i, Index j) {
                const Index r = std::max(i, j), c = std::min(i, j);
                return c * p - c * (c - 1) / 2 + (r - c);
            };
            const Vector r = y - mu_y;
            const Matrix sxbt = model.sigma_x * model.b.transpose();
            Matrix oracle = Matrix::Zero(m, m);
            for (Index a = 0; a < m; ++a) {
                for (Index b = 0; b < m; ++b) {
                    double acc = 0.0;
                    for (Index j = 0; j < p; ++j) {
                        for (Index h = 0; h < p; ++h) {
                            for (Index jp = 0; jp < p; ++jp) {
                                for (Index hp = 0; hp < p; ++hp) {
                                    acc += r[j] * sxbt(a, h) *
                                           vt.v_tilde2(vech_idx(h, j),
                                                       vech_idx(hp, jp)) *
                                           r[jp] * sxbt(b, hp);
                                }
                            }
                        }
                    }
                    oracle(a, b) = acc;
                }
            }
            CHECK((correction - oracle).cwiseAbs().maxCoeff() /
                      std::max(1.0, oracle.cwiseAbs().maxCoeff()) <
                  1e-10);
            // the correction is a congruence of a PSD matrix
            CHECK(min_eigenvalue(symmetrize(correction)) > -1e-10);
        }
    }
}

TEST_CASE("psd_projected_v clips at the trace-scaled floor") {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 3.0;
    v(1, 1) = -1.0;
    const Matrix proj = psd_projected_v(v);
    CHECK(min_eigenvalue(proj) >= 0.0);
    CHECK(proj(0, 0) == doctest::Approx(3.0));
}
