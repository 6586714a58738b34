#include "obslab/recovery/least_squares.hpp"

#include <cmath>
#include <sstream>

#include "obslab/errors.hpp"

namespace obslab {

TikhonovResult tikhonov_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double noise,
                              double floor, double condition_limit, double discrepancy_factor) {
    require(a.rows() == b.size(), "least-squares right-hand side has the wrong length");
    require(a.cols() >= 1 && a.rows() >= a.cols(), "least-squares system is underdetermined");
    require(noise >= 0.0 && floor > 0.0, "invalid regularization parameters");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    TikhonovResult out;
    out.singular_values = s;
    out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(smax > 0.0)) throw NumericalError("least-squares dictionary is identically zero");
    if (!(out.condition <= condition_limit)) {
        std::ostringstream msg;
        msg << "dictionary is rank-deficient: condition number " << out.condition << " exceeds "
            << condition_limit;
        throw NumericalError(msg.str());
    }

    const Eigen::VectorXd beta = svd.matrixU().transpose() * b;
    const double outside = std::max(0.0, b.squaredNorm() - beta.squaredNorm());
    auto residual = [&](double alpha) {
        const Eigen::ArrayXd f = alpha / (s.array().square() + alpha);
        return std::sqrt((f * beta.array()).square().sum() + outside);
    };
    auto solve = [&](double alpha) {
        const Eigen::VectorXd coeff = (s.array() / (s.array().square() + alpha) * beta.array()).matrix();
        return Eigen::VectorXd(svd.matrixV() * coeff);
    };

    double alpha = floor * smax * smax;
    const double target = discrepancy_factor * noise;
    if (target > 0.0 && residual(alpha) < target) {
        double lo = std::log(alpha);
        double hi = std::log(1e6 * smax * smax);
        if (residual(std::exp(hi)) <= target) {
            lo = hi;
        } else {
            for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                (residual(std::exp(mid)) < target ? lo : hi) = mid;
            }
        }
        alpha = std::exp(lo);
    }
    out.weight = alpha;
    out.x = solve(alpha);
    out.residual = residual(alpha);
    return out;
}

}  // namespace obslab
