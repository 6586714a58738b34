#pragma once

#include <Eigen/Dense>

#include "obslab/domain/series.hpp"

namespace obslab {

/// (S h)(t) = int_0^t lambda(t-s) h(s) ds by the trapezoid rule on the
/// kernel's grid; y(0) = 0 exactly. The kernel must cover the series.
Eigen::VectorXd convolve(const Kernel& lambda, const Eigen::VectorXd& h);
Eigen::VectorXcd convolve(const Kernel& lambda, const Eigen::VectorXcd& h);

struct DeconvolutionOptions {
    std::size_t smoothing_width = 1;  ///< odd moving-average width applied to y first
    double origin_tolerance = 1e-8;   ///< allowed |y(0)| relative to max(1, max|y|)
};

/// Inverts S: differentiates y and solves the second-kind equation
/// lambda(0) h(t) + int_0^t lambda'(t-s) h(s) ds = y'(t) by sequential
/// trapezoid substitution.
Eigen::VectorXd deconvolve(const Kernel& lambda, const Eigen::VectorXd& y,
                           const DeconvolutionOptions& options = {});
Eigen::VectorXcd deconvolve(const Kernel& lambda, const Eigen::VectorXcd& y,
                            const DeconvolutionOptions& options = {});

/// Column-by-column versions for traces. A complex kernel applied to a real
/// trace yields a complex trace.
BoundaryTrace deconvolve(const Kernel& lambda, const BoundaryTrace& y,
                         const DeconvolutionOptions& options = {});
ComplexTrace deconvolve(const Kernel& lambda, const ComplexTrace& y,
                        const DeconvolutionOptions& options = {});
BoundaryTrace convolve(const Kernel& lambda, const BoundaryTrace& h);

/// Centred moving average of odd width; the window shrinks symmetrically
/// near the ends so the end samples are kept.
Eigen::VectorXcd moving_average(const Eigen::VectorXcd& y, std::size_t width);

/// ||lambda'||^2 on (0, tau) from centred differences and the trapezoid rule.
double kernel_derivative_norm_sq(const Kernel& lambda, double tau);

/// sqrt(2) / (kappa |lambda(0)|) * exp(tau ||lambda'||^2 / |lambda(0)|^2).
double amplification_constant(const Kernel& lambda, double tau, double kappa);
/// kappa_tilde |lambda(0)| * exp(tau ||lambda'||^2 / |lambda(0)|^2).
double dual_norm_amplification(const Kernel& lambda, double tau, double kappa_tilde = 1.0);

}  // namespace obslab
