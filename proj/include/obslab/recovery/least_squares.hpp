#pragma once

#include <Eigen/Dense>

namespace obslab {

struct TikhonovResult {
    Eigen::VectorXd x;
    Eigen::VectorXd singular_values;
    double weight = 0.0;     ///< absolute Tikhonov weight alpha
    double condition = 0.0;  ///< sigma_max / sigma_min of the matrix
    double residual = 0.0;   ///< ||A x - b||
};

/// min ||A x - b||^2 + alpha ||x||^2 through the thin SVD. alpha is picked
/// by the discrepancy principle ||A x - b|| = discrepancy_factor * noise, and
/// never drops below floor * sigma_max^2. A condition number above
/// `condition_limit` raises NumericalError instead of being regularized away.
TikhonovResult tikhonov_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double noise,
                              double floor = 1e-12, double condition_limit = 1e12,
                              double discrepancy_factor = 1.0);

}  // namespace obslab
