#pragma once

#include "pspp/rng.hpp"

namespace pspp {

// Symmetric PSD factor F with F F' = cov; tolerates singular covariances
// (zero evolution noise, degenerate components).
Matrix sampling_factor(const Matrix& cov);

// mu + F z with z standard normal; factor from sampling_factor().
Vector mvnormal(const Vector& mu, const Matrix& factor, Rng& rng);

// Wishart W_p(dof, scale) draw via the Bartlett decomposition; real
// dof > p - 1.
Matrix wishart(double dof, const Matrix& scale, Rng& rng);

// Joint draw with the classic normal / chi-square ratio construction:
// (Z / sqrt(Q/n)) has the heavy-tailed elliptical law with n dof and
// scale matrix c.
Vector multivariate_t(double n, const Vector& mu, const Matrix& c, Rng& rng);

}  // namespace pspp
