#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <pspp/postulates.hpp>

using namespace pspp;

namespace {

TJointSpec scalar_spec(double n) {
    TJointSpec s;
    s.n = n;
    s.mu_x = Vector::Constant(1, 0.3);
    s.mu_y = Vector::Constant(1, -0.2);
    s.c11 = Matrix::Constant(1, 1, 2.0);
    s.c22 = Matrix::Constant(1, 1, 1.5);
    s.c12 = Matrix::Constant(1, 1, 0.8);
    return s;
}

// equal-count bins of a scalar key; returns per-bin index lists
std::vector<std::vector<int>> bin_indices(const std::vector<double>& key,
                                          int bins) {
    std::vector<int> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return key[a] < key[b]; });
    std::vector<std::vector<int>> out(bins);
    const int n = static_cast<int>(key.size());
    for (int b = 0; b < bins; ++b) {
        const int lo = static_cast<int>(static_cast<long long>(n) * b / bins);
        const int hi =
            static_cast<int>(static_cast<long long>(n) * (b + 1) / bins);
        out[b].assign(order.begin() + lo, order.begin() + hi);
    }
    return out;
}

}  // namespace

TEST_CASE("student conditional factor at the mean and by substitution") {
    TJointSpec s = scalar_spec(10.0);
    s.c22 = Matrix::Constant(1, 1, 1.0);

    const auto at_mean = student_t_conditional_moments(s, s.mu_y);
    CHECK(at_mean.factor == 1.0);

    // y - mu_y = 2, C22 = 1: factor 1 + 4/10, dof 11
    const Vector y = s.mu_y + Vector::Constant(1, 2.0);
    const auto off = student_t_conditional_moments(s, y);
    CHECK(off.factor == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(off.dof == doctest::Approx(11.0));
    CHECK(off.moments.mean[0] ==
          doctest::Approx(s.mu_x[0] - 0.8 * s.mu_y[0]).epsilon(1e-12));
}

TEST_CASE("student conditional rejects dof <= 2 with a distinct error") {
    const TJointSpec s = scalar_spec(1.5);
    CHECK_THROWS_AS(student_t_conditional_moments(s, s.mu_y), domain_error);
}

TEST_CASE("student factor >= 1, inverted factor in (0,1], both 1 at the mean "
          "and monotone to 1 in n") {
    TJointSpec s = scalar_spec(8.0);
    const Vector y = s.mu_y + Vector::Constant(1, 1.1);
    double prev_student = 10.0, prev_inverted = 0.0;
    for (double n : {3.0, 6.0, 12.0, 50.0, 500.0}) {
        s.n = n;
        const auto st = student_t_conditional_moments(s, y);
        const auto it = inverted_t_conditional_moments(s, y);
        CHECK(st.factor >= 1.0);
        CHECK(it.factor > 0.0);
        CHECK(it.factor <= 1.0);
        CHECK(st.factor < prev_student);
        CHECK(it.factor > prev_inverted);
        prev_student = st.factor;
        prev_inverted = it.factor;
    }
    s.n = 1e9;
    CHECK(student_t_conditional_moments(s, y).factor ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("binned Monte Carlo conditional variance tracks the closed form "
          "(n = 30)") {
    Rng rng(31);
    TJointSpec s = scalar_spec(30.0);
    s.mu_x = Vector::Constant(1, rng.normal());
    s.mu_y = Vector::Constant(1, rng.normal());
    s.c22 = Matrix::Constant(1, 1, 0.5 + rng.uniform() * 2.0);
    s.c12 = Matrix::Constant(1, 1, 0.7 * rng.normal() * std::sqrt(s.c22(0, 0)));
    s.c11 = Matrix::Constant(
        1, 1, s.c12(0, 0) * s.c12(0, 0) / s.c22(0, 0) + 0.5 + rng.uniform());
    const double a = s.c12(0, 0) / s.c22(0, 0);

    const int draws = 1000000;
    std::vector<double> resid(draws), q(draws);
    for (int i = 0; i < draws; ++i) {
        const auto [x, y] = sample_t_joint(s, rng);
        resid[i] = x[0] - a * y[0];
        const double d = y[0] - s.mu_y[0];
        q[i] = d * d / s.c22(0, 0);
    }

    for (const auto& bin : bin_indices(q, 5)) {
        double mq = 0.0, mr = 0.0;
        for (int i : bin) {
            mq += q[i];
            mr += resid[i];
        }
        mq /= static_cast<double>(bin.size());
        mr /= static_cast<double>(bin.size());
        double var = 0.0;
        for (int i : bin) var += (resid[i] - mr) * (resid[i] - mr);
        var /= static_cast<double>(bin.size() - 1);

        // closed form evaluated at the bin's mean quadratic form; the
        // conditional variance is linear in it, so binning is unbiased
        TJointSpec probe = s;
        const Vector y_probe =
            s.mu_y + Vector::Constant(1, std::sqrt(mq * s.c22(0, 0)));
        const auto cf = student_t_conditional_moments(probe, y_probe);
        CHECK(std::abs(var - cf.moments.cov(0, 0)) / cf.moments.cov(0, 0) <
              0.05);
    }
}

TEST_CASE("inverted conditional factor and support") {
    TJointSpec s = scalar_spec(20.0);
    s.c22 = Matrix::Constant(1, 1, 1.0);

    const auto at_mean = inverted_t_conditional_moments(s, s.mu_y);
    CHECK(at_mean.factor == 1.0);

    // quadratic form 2 with n = 20: factor 0.9
    const Vector y = s.mu_y + Vector::Constant(1, std::sqrt(2.0));
    const auto off = inverted_t_conditional_moments(s, y);
    CHECK(off.factor == doctest::Approx(0.9).epsilon(1e-12));

    // support boundary
    const Vector far = s.mu_y + Vector::Constant(1, std::sqrt(21.0));
    CHECK_THROWS_AS(inverted_t_conditional_moments(s, far), domain_error);
}

TEST_CASE("inverted-law sampler stays inside the support bound") {
    Rng rng(32);
    const double n = 5.0;
    const Vector mu{{0.4, -0.7}};
    const Matrix c{{1.2, 0.3}, {0.3, 0.8}};
    const Matrix c_inv = spd_inverse(c);
    Vector mean_acc = Vector::Zero(2);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Vector x = sample_inverted_t(n, mu, c, rng);
        const Vector d = x - mu;
        REQUIRE(d.dot(c_inv * d) <= n + 1e-12);
        mean_acc += x;
    }
    mean_acc /= draws;
    // symmetry of the construction: mean = mu; sd per component is
    // sqrt(n/(n+p) c_ii / draws)
    for (Index i = 0; i < 2; ++i) {
        const double se = std::sqrt(n / (n + 2.0) * c(i, i) / draws);
        CHECK(std::abs(mean_acc[i] - mu[i]) < 3.0 * se);
    }
}

TEST_CASE("inverted-law sampler variance matches the density by quadrature "
          "(p = 1, n = 5)") {
    const double n = 5.0;
    const double c = 1.3;

    // density c0 * (n - x^2/c)^{n/2 - 1} on x^2 < n c; substituting
    // x = sqrt(n c) sin(theta) gives a smooth integrand for Simpson
    const double c0 = std::tgamma((n + 1.0) / 2.0) /
                      (std::sqrt(3.14159265358979323846) *
                       std::tgamma(n / 2.0) * std::sqrt(c) *
                       std::pow(n, (n - 1.0) / 2.0));
    const double limit = std::sqrt(n * c);
    auto integrate = [&](auto f) {
        const int steps = 20000;  // even
        const double h = 3.14159265358979323846 / steps;
        double acc = 0.0;
        for (int k = 0; k <= steps; ++k) {
            const double theta = -3.14159265358979323846 / 2.0 + k * h;
            const double x = limit * std::sin(theta);
            const double density =
                c0 * std::pow(n * std::cos(theta) * std::cos(theta),
                              n / 2.0 - 1.0);
            const double w = (k == 0 || k == steps) ? 1.0
                             : (k % 2 == 1)         ? 4.0
                                                    : 2.0;
            acc += w * f(x) * density * limit * std::cos(theta);
        }
        return acc * h / 3.0;
    };
    const double total = integrate([](double) { return 1.0; });
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-8));
    const double var_quadrature =
        integrate([](double x) { return x * x; });

    Rng rng(33);
    const int draws = 200000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x =
            sample_inverted_t(n, Vector::Zero(1), Matrix::Constant(1, 1, c),
                              rng)[0];
        s1 += x;
        s2 += x * x;
    }
    const double var_mc = s2 / draws - (s1 / draws) * (s1 / draws);
    CHECK(std::abs(var_mc - var_quadrature) / var_quadrature < 0.02);
}

TEST_CASE("wishart partition moments") {
    SUBCASE("identity S at y = n S22") {
        WishartSpec spec;
        spec.n = 5.0;
        spec.s = Matrix::Identity(2, 2);
        const auto rep = wishart_partition_moments(spec, 5.0);
        CHECK(rep.a_xy == 0.0);
        CHECK(rep.resid_var == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(rep.cond_var == doctest::Approx(5.0).epsilon(1e-14));
    }
    SUBCASE("direct substitution") {
        WishartSpec spec;
        spec.n = 4.0;
        spec.s = Matrix{{2.0, 1.0}, {1.0, 1.0}};
        const auto rep = wishart_partition_moments(spec, 4.0);
        CHECK(rep.a_xy == doctest::Approx(1.0));
        CHECK(rep.resid_var == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(rep.resid_mean == 0.0);
    }
    SUBCASE("cond_var equals resid_var exactly at y = n S22") {
        WishartSpec spec;
        spec.n = 7.5;
        spec.s = Matrix{{1.3, 0.4}, {0.4, 0.9}};
        const auto rep = wishart_partition_moments(spec, spec.n * spec.s(1, 1));
        CHECK(rep.cond_var == doctest::Approx(rep.resid_var).epsilon(1e-14));
    }
    SUBCASE("rejects nonpositive y") {
        WishartSpec spec;
        spec.n = 3.0;
        spec.s = Matrix::Identity(2, 2);
        CHECK_THROWS_AS(wishart_partition_moments(spec, 0.0), domain_error);
    }
}

TEST_CASE("wishart conditional moments against windowed Monte Carlo") {
    WishartSpec spec;
    spec.n = 50.0;
    spec.s = Matrix{{1.1, 0.5}, {0.5, 0.8}};
    Rng rng(34);

    const double y_target = spec.n * spec.s(1, 1);
    const double window = 0.05 * std::sqrt(2.0 * spec.n) * spec.s(1, 1);

    std::vector<double> xs, ys;
    for (int i = 0; i < 400000; ++i) {
        const Matrix w = wishart(spec.n, spec.s, rng);
        if (std::abs(w(1, 1) - y_target) <= window) {
            xs.push_back(w(0, 1));
            ys.push_back(w(1, 1));
        }
    }
    REQUIRE(xs.size() > 5000);
    const double n_in = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n_in;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n_in;
    double vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        vx += (xs[i] - mx) * (xs[i] - mx);
        vy += (ys[i] - my) * (ys[i] - my);
    }
    vx /= n_in - 1.0;
    vy /= n_in - 1.0;

    const auto rep = wishart_partition_moments(spec, my);
    CHECK(std::abs(mx - rep.cond_mean) / rep.cond_mean < 0.05);
    // remove the within-window spread of the conditional mean before
    // comparing variances
    const double corrected = vx - rep.a_xy * rep.a_xy * vy;
    CHECK(std::abs(corrected - rep.cond_var) / rep.cond_var < 0.05);
}

TEST_CASE("second-order checker: Gaussian joint passes at 3 sigma") {
    Rng rng(35);
    const Matrix a{{0.6}, {-0.3}};  // m = 2, p = 1
    const Matrix resid_factor = sampling_factor(Matrix{{1.0, 0.2}, {0.2, 0.7}});
    JointSampler sampler = [&](Rng& r) -> std::pair<Vector, Vector> {
        const Vector y = Vector::Constant(1, 1.5 * r.normal());
        const Vector x = a * y + resid_factor * r.normal_vector(2);
        return {x, y};
    };
    const auto rep = mc_second_order_check(sampler, a, 4, 40000, rng);
    CHECK(rep.within(3.0));
    CHECK(rep.bin_counts.size() == 4);
}

TEST_CASE("second-order checker: heavy-tailed joint with large n stays in a "
          "narrow band, small n is flagged") {
    const TJointSpec wide = scalar_spec(30.0);
    const Matrix a =
        regression_matrix(wide.c12, wide.c22);

    Rng rng(36);
    JointSampler sampler30 = [&](Rng& r) { return sample_t_joint(wide, r); };
    const auto rep30 = mc_second_order_check(sampler30, a, 10, 200000, rng);
    CHECK(rep30.max_cov_dev < 0.12);  // factor band around 1 at n = 30

    const TJointSpec narrow = scalar_spec(3.0);
    JointSampler sampler3 = [&](Rng& r) { return sample_t_joint(narrow, r); };
    const auto rep3 = mc_second_order_check(sampler3, a, 10, 200000, rng);
    CHECK(rep3.max_cov_dev > 0.5);           // deviation flag
    CHECK_FALSE(rep3.within(3.0));
    CHECK(rep3.max_cov_dev > rep30.max_cov_dev);
}

TEST_CASE("second-order checker pass rate at 3 sigma over seeded repetitions") {
    const Matrix a = Matrix::Constant(1, 1, 0.8);
    int passes = 0;
    const int reps = 100;
    for (int seed = 0; seed < reps; ++seed) {
        Rng rng(900 + seed);
        JointSampler sampler = [&](Rng& r) -> std::pair<Vector, Vector> {
            const Vector y = Vector::Constant(1, r.normal());
            const Vector x =
                a * y + Vector::Constant(1, 0.9 * r.normal());
            return {x, y};
        };
        if (mc_second_order_check(sampler, a, 4, 4000, rng).within(3.0)) {
            ++passes;
        }
    }
    CHECK(passes >= 99);
}

TEST_CASE("second-order checker input contracts") {
    Rng rng(37);
    JointSampler sampler = [](Rng& r) -> std::pair<Vector, Vector> {
        return {Vector::Constant(1, r.normal()), Vector::Constant(1, r.normal())};
    };
    CHECK_THROWS_AS(
        mc_second_order_check(sampler, Matrix::Identity(1, 1), 1, 5000, rng),
        domain_error);
    CHECK_THROWS_AS(
        mc_second_order_check(sampler, Matrix::Identity(1, 1), 4, 200, rng),
        domain_error);
}
