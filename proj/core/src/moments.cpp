#include "pspp/moments.hpp"

#include <string>

namespace pspp {

Matrix JointMoments::stacked_cov() const {
    const Index m = dim_x();
    const Index p = dim_y();
    Matrix z(m + p, m + p);
    z.topLeftCorner(m, m) = sigma_x;
    z.topRightCorner(m, p) = cov_xy;
    z.bottomLeftCorner(p, m) = cov_xy.transpose();
    z.bottomRightCorner(p, p) = sigma_y;
    return z;
}

void JointMoments::validate() const {
    const Index m = dim_x();
    const Index p = dim_y();
    if (m < 1 || p < 1) {
        throw dimension_error("JointMoments: empty mean vector");
    }
    if (sigma_x.rows() != m || sigma_x.cols() != m || sigma_y.rows() != p ||
        sigma_y.cols() != p || cov_xy.rows() != m || cov_xy.cols() != p) {
        throw dimension_error("JointMoments: inconsistent block dimensions");
    }
    require_symmetric(sigma_x, "JointMoments.sigma_x");
    require_symmetric(sigma_y, "JointMoments.sigma_y");
    const double lam = min_eigenvalue(stacked_cov());
    const double scale = std::max(1.0, stacked_cov().cwiseAbs().maxCoeff());
    if (lam < -1e-8 * scale) {
        throw not_psd_error(
            "JointMoments: stacked covariance is not PSD (eigenvalue " +
                std::to_string(lam) + ")",
            lam);
    }
}

}  // namespace pspp
