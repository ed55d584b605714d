#pragma once

#include <Eigen/Dense>

#include "pspp/errors.hpp"

namespace pspp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Condition-number cap for covariance inverses; inverses past this fail loudly.
inline constexpr double kConditionCap = 1e12;
// Relative tolerance used when checking that a matrix is symmetric.
inline constexpr double kSymmetryTol = 1e-12;

bool is_symmetric(const Matrix& s, double rel_tol = kSymmetryTol);
void require_symmetric(const Matrix& s, const char* what,
                       double rel_tol = kSymmetryTol);

// (M + M')/2, counters floating-point drift in long recursions.
Matrix symmetrize(const Matrix& m);

inline Index vech_size(Index p) { return p * (p + 1) / 2; }

// Lower-triangle, column-major stacking of a symmetric matrix.
Vector vech(const Matrix& s);
// Inverse of vech; v must have length dim(dim+1)/2.
Matrix unvech(const Vector& v, Index dim);

// G_p with vec(S) = G_p * vech(S) for every symmetric p x p matrix S.
Matrix duplication_matrix(Index p);

// Symmetric square root: M with M*M = S.  S must be PSD up to
// -1e-10 * ||S|| on the smallest eigenvalue; tiny negatives are clamped.
Matrix sym_sqrt(const Matrix& s);
// M with M*M = inverse(S); S must be positive definite.
Matrix sym_sqrt_inv(const Matrix& s, double condition_cap = kConditionCap);

// Inverse of a symmetric positive-definite matrix through its
// eigendecomposition, guarded by a condition-number cap.
Matrix spd_inverse(const Matrix& s, double condition_cap = kConditionCap);
Matrix spd_solve(const Matrix& s, const Matrix& rhs,
                 double condition_cap = kConditionCap);
Vector spd_solve(const Matrix& s, const Vector& rhs,
                 double condition_cap = kConditionCap);

// d' * inverse(S) * d
double quad_form_inv(const Matrix& s, const Vector& d,
                     double condition_cap = kConditionCap);

// A_xy = Cov(X,Y) * inverse(Var(Y)); cov_xy is m x p, var_y is p x p.
Matrix regression_matrix(const Matrix& cov_xy, const Matrix& var_y,
                         double condition_cap = kConditionCap);

// Eigenvalues in (-tol * scale, 0) are clipped to zero; anything more
// negative throws not_psd_error.  scale = max(1, |lambda|_max).
Matrix psd_clip(const Matrix& s, double tol = 1e-10);

// Eigenvalues below `floor` are raised to `floor`.  Used where an
// indefinite variance estimate must be made invertible.
Matrix psd_floor(const Matrix& s, double floor);

double min_eigenvalue(const Matrix& s);

}  // namespace pspp
