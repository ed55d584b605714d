#pragma once

#include "pspp/linalg.hpp"

namespace pspp {

// A partially specified law: first two moments only.
struct MomentPair {
    Vector mean;
    Matrix cov;
};

// First two moments of a joint law of (X, Y).
struct JointMoments {
    Vector mu_x;     // m
    Vector mu_y;     // p
    Matrix sigma_x;  // m x m
    Matrix sigma_y;  // p x p
    Matrix cov_xy;   // m x p

    Index dim_x() const { return mu_x.size(); }
    Index dim_y() const { return mu_y.size(); }

    // [[Sigma_x, C_xy], [C_xy', Sigma_y]]
    Matrix stacked_cov() const;

    // Dimensions consistent, blocks symmetric, stacked covariance PSD
    // up to rounding.
    void validate() const;
};

}  // namespace pspp
