#include "pspp/samplers.hpp"

#include <cmath>

namespace pspp {

Matrix sampling_factor(const Matrix& cov) { return sym_sqrt(cov); }

Vector mvnormal(const Vector& mu, const Matrix& factor, Rng& rng) {
    if (factor.rows() != mu.size()) {
        throw dimension_error("mvnormal: factor/mean dimension mismatch");
    }
    return mu + factor * rng.normal_vector(factor.cols());
}

Matrix wishart(double dof, const Matrix& scale, Rng& rng) {
    require_symmetric(scale, "wishart");
    const Index p = scale.rows();
    if (dof <= static_cast<double>(p) - 1.0) {
        throw domain_error("wishart: dof must exceed p - 1");
    }
    Eigen::LLT<Matrix> llt(scale);
    if (llt.info() != Eigen::Success) {
        throw not_psd_error("wishart: scale matrix is not positive definite",
                            min_eigenvalue(scale));
    }
    Matrix bartlett = Matrix::Zero(p, p);
    for (Index i = 0; i < p; ++i) {
        bartlett(i, i) = std::sqrt(rng.chi_square(dof - static_cast<double>(i)));
        for (Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
    }
    const Matrix lb = llt.matrixL() * bartlett;
    return symmetrize(lb * lb.transpose());
}

Vector multivariate_t(double n, const Vector& mu, const Matrix& c, Rng& rng) {
    if (n <= 0.0) throw domain_error("multivariate_t: dof must be positive");
    const Matrix f = sampling_factor(c);
    const Vector z = rng.normal_vector(mu.size());
    const double q = rng.chi_square(n);
    return mu + f * z * std::sqrt(n / q);
}

}  // namespace pspp
