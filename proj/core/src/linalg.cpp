#include "pspp/linalg.hpp"

#include <cmath>
#include <string>

namespace pspp {

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const Matrix& s,
                                                 const char* what) {
    require_symmetric(s, what);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) {
        throw error(std::string(what) + ": eigendecomposition failed");
    }
    return es;
}

}  // namespace

bool is_symmetric(const Matrix& s, double rel_tol) {
    if (s.rows() != s.cols()) return false;
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    return (s - s.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

void require_symmetric(const Matrix& s, const char* what, double rel_tol) {
    if (s.rows() != s.cols()) {
        throw dimension_error(std::string(what) + ": matrix is " +
                              std::to_string(s.rows()) + "x" +
                              std::to_string(s.cols()) + ", expected square");
    }
    if (!is_symmetric(s, rel_tol)) {
        throw dimension_error(std::string(what) + ": matrix is not symmetric");
    }
}

Matrix symmetrize(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw dimension_error("symmetrize: matrix must be square");
    }
    return 0.5 * (m + m.transpose());
}

Vector vech(const Matrix& s) {
    require_symmetric(s, "vech");
    const Index p = s.rows();
    Vector out(vech_size(p));
    Index k = 0;
    for (Index j = 0; j < p; ++j) {
        for (Index i = j; i < p; ++i) {
            out[k++] = s(i, j);
        }
    }
    return out;
}

Matrix unvech(const Vector& v, Index dim) {
    if (dim < 1) throw dimension_error("unvech: dim must be >= 1");
    if (v.size() != vech_size(dim)) {
        throw dimension_error("unvech: vector length " +
                              std::to_string(v.size()) + " does not match dim " +
                              std::to_string(dim));
    }
    Matrix s(dim, dim);
    Index k = 0;
    for (Index j = 0; j < dim; ++j) {
        for (Index i = j; i < dim; ++i) {
            s(i, j) = v[k];
            s(j, i) = v[k];
            ++k;
        }
    }
    return s;
}

Matrix duplication_matrix(Index p) {
    if (p < 1) throw dimension_error("duplication_matrix: p must be >= 1");
    Matrix g = Matrix::Zero(p * p, vech_size(p));
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            const Index r = std::max(i, j);
            const Index c = std::min(i, j);
            // vech index of entry (r, c), lower triangle column-stacked
            const Index h = c * p - c * (c - 1) / 2 + (r - c);
            g(j * p + i, h) = 1.0;
        }
    }
    return g;
}

Matrix sym_sqrt(const Matrix& s) {
    auto es = eigensolve(s, "sym_sqrt");
    Vector lam = es.eigenvalues();
    // tolerance relative to the spectral norm; eigenvalues inside the band
    // are rounding noise and clamp to zero
    const double tol = 1e-10 * lam.cwiseAbs().maxCoeff();
    for (Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -tol) {
            throw not_psd_error("sym_sqrt: matrix is not positive semi-definite",
                                lam[i]);
        }
        lam[i] = std::sqrt(std::max(lam[i], 0.0));
    }
    return symmetrize(es.eigenvectors() * lam.asDiagonal() *
                      es.eigenvectors().transpose());
}

Matrix sym_sqrt_inv(const Matrix& s, double condition_cap) {
    auto es = eigensolve(s, "sym_sqrt_inv");
    Vector lam = es.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    const double lam_min = lam.minCoeff();
    if (lam_min <= 0.0 || lam_max / lam_min > condition_cap) {
        throw singular_error("sym_sqrt_inv: matrix is not positive definite",
                             lam_min > 0.0 ? lam_max / lam_min
                                           : std::numeric_limits<double>::infinity());
    }
    for (Index i = 0; i < lam.size(); ++i) lam[i] = 1.0 / std::sqrt(lam[i]);
    return symmetrize(es.eigenvectors() * lam.asDiagonal() *
                      es.eigenvectors().transpose());
}

Matrix spd_inverse(const Matrix& s, double condition_cap) {
    auto es = eigensolve(s, "spd_inverse");
    const Vector& lam = es.eigenvalues();
    const double lam_max = lam.cwiseAbs().maxCoeff();
    const double lam_min = lam.minCoeff();
    const double condition =
        lam_min > 0.0 ? lam_max / lam_min : std::numeric_limits<double>::infinity();
    if (lam_min <= 0.0 || condition > condition_cap) {
        throw singular_error(
            "spd_inverse: matrix singular or ill-conditioned (condition ~ " +
                std::to_string(condition) + ", smallest eigenvalue " +
                std::to_string(lam_min) + ")",
            condition);
    }
    return symmetrize(es.eigenvectors() * lam.cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose());
}

Matrix spd_solve(const Matrix& s, const Matrix& rhs, double condition_cap) {
    if (s.rows() != rhs.rows()) {
        throw dimension_error("spd_solve: dimension mismatch");
    }
    return spd_inverse(s, condition_cap) * rhs;
}

Vector spd_solve(const Matrix& s, const Vector& rhs, double condition_cap) {
    if (s.rows() != rhs.size()) {
        throw dimension_error("spd_solve: dimension mismatch");
    }
    return spd_inverse(s, condition_cap) * rhs;
}

double quad_form_inv(const Matrix& s, const Vector& d, double condition_cap) {
    return d.dot(spd_solve(s, d, condition_cap));
}

Matrix regression_matrix(const Matrix& cov_xy, const Matrix& var_y,
                         double condition_cap) {
    if (cov_xy.cols() != var_y.rows()) {
        throw dimension_error("regression_matrix: Cov(X,Y) is " +
                              std::to_string(cov_xy.rows()) + "x" +
                              std::to_string(cov_xy.cols()) + " but Var(Y) is " +
                              std::to_string(var_y.rows()) + "x" +
                              std::to_string(var_y.cols()));
    }
    return cov_xy * spd_inverse(var_y, condition_cap);
}

Matrix psd_clip(const Matrix& s, double tol) {
    auto es = eigensolve(s, "psd_clip");
    Vector lam = es.eigenvalues();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    for (Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -tol * scale) {
            throw not_psd_error(
                "psd_clip: eigenvalue " + std::to_string(lam[i]) +
                    " below rounding tolerance; matrix is materially indefinite",
                lam[i]);
        }
        lam[i] = std::max(lam[i], 0.0);
    }
    return symmetrize(es.eigenvectors() * lam.asDiagonal() *
                      es.eigenvectors().transpose());
}

Matrix psd_floor(const Matrix& s, double floor) {
    auto es = eigensolve(s, "psd_floor");
    Vector lam = es.eigenvalues();
    for (Index i = 0; i < lam.size(); ++i) lam[i] = std::max(lam[i], floor);
    return symmetrize(es.eigenvectors() * lam.asDiagonal() *
                      es.eigenvectors().transpose());
}

double min_eigenvalue(const Matrix& s) {
    return eigensolve(s, "min_eigenvalue").eigenvalues().minCoeff();
}

}  // namespace pspp
