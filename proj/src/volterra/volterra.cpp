#include "obslab/volterra/volterra.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "obslab/errors.hpp"

namespace obslab {

namespace {

using cd = std::complex<double>;

template <class T>
std::vector<T> samples(const Kernel& k);

template <>
std::vector<double> samples<double>(const Kernel& k) {
    require(!k.is_complex(), "complex kernel applied to a real series");
    return k.re;
}

template <>
std::vector<cd> samples<cd>(const Kernel& k) {
    std::vector<cd> v(k.size());
    for (std::size_t n = 0; n < k.size(); ++n) v[n] = k.at(n);
    return v;
}

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
Vec<T> convolve_impl(const Kernel& kernel, const Vec<T>& h) {
    const auto lam = samples<T>(kernel);
    const auto n = static_cast<std::size_t>(h.size());
    require(n >= 1 && lam.size() >= n, "series is longer than the kernel");
    const double dt = kernel.dt;
    Vec<T> y = Vec<T>::Zero(h.size());
    for (std::size_t i = 1; i < n; ++i) {
        T s = 0.5 * (lam[i] * h(0) + lam[0] * h(static_cast<Eigen::Index>(i)));
        for (std::size_t j = 1; j < i; ++j) s += lam[i - j] * h(static_cast<Eigen::Index>(j));
        y(static_cast<Eigen::Index>(i)) = dt * s;
    }
    return y;
}

template <class T>
Vec<T> kernel_derivative(const std::vector<T>& lam, double dt) {
    Vec<T> v(static_cast<Eigen::Index>(lam.size()));
    for (std::size_t n = 0; n < lam.size(); ++n) v(static_cast<Eigen::Index>(n)) = lam[n];
    if constexpr (std::is_same_v<T, double>) {
        return time_derivative(v, dt);
    } else {
        return time_derivative(Eigen::VectorXcd(v), dt);
    }
}

template <class T>
Vec<T> smooth(const Vec<T>& y, std::size_t width) {
    if (width <= 1) return y;
    if constexpr (std::is_same_v<T, double>) {
        return moving_average(y.template cast<cd>(), width).real();
    } else {
        return moving_average(y, width);
    }
}

template <class T>
Vec<T> deconvolve_impl(const Kernel& kernel, const Vec<T>& y_in,
                       const DeconvolutionOptions& options) {
    const auto lam = samples<T>(kernel);
    const auto n = static_cast<std::size_t>(y_in.size());
    require(n >= 2 && lam.size() >= n, "series is longer than the kernel");
    const T lam0 = lam[0];
    require(std::abs(lam0) >= 1e-12, "kernel with lambda(0) = 0 is rejected (ill-posed)");
    const double scale = std::max(1.0, y_in.cwiseAbs().maxCoeff());
    require(std::abs(y_in(0)) <= options.origin_tolerance * scale,
            "series must vanish at t = 0, got y(0) = " + std::to_string(std::abs(y_in(0))));

    const double dt = kernel.dt;
    const Vec<T> y = smooth(y_in, options.smoothing_width);
    Vec<T> dy;
    if constexpr (std::is_same_v<T, double>) {
        dy = time_derivative(y, dt);
    } else {
        dy = time_derivative(Eigen::VectorXcd(y), dt);
    }
    const Vec<T> dlam = kernel_derivative(lam, dt);

    Vec<T> h(y.size());
    h(0) = dy(0) / lam0;
    const T diag = lam0 + 0.5 * dt * dlam(0);
    require(std::abs(diag) >= 1e-14, "second-kind equation is singular at this time step");
    for (std::size_t i = 1; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        T s = 0.5 * dlam(ii) * h(0);
        for (std::size_t j = 1; j < i; ++j) {
            s += dlam(static_cast<Eigen::Index>(i - j)) * h(static_cast<Eigen::Index>(j));
        }
        h(ii) = (dy(ii) - dt * s) / diag;
    }
    if (!h.allFinite()) throw NumericalError("deconvolution produced non-finite values");
    return h;
}

}  // namespace

Eigen::VectorXd convolve(const Kernel& lambda, const Eigen::VectorXd& h) {
    return convolve_impl<double>(lambda, h);
}

Eigen::VectorXcd convolve(const Kernel& lambda, const Eigen::VectorXcd& h) {
    return convolve_impl<cd>(lambda, h);
}

Eigen::VectorXd deconvolve(const Kernel& lambda, const Eigen::VectorXd& y,
                           const DeconvolutionOptions& options) {
    return deconvolve_impl<double>(lambda, y, options);
}

Eigen::VectorXcd deconvolve(const Kernel& lambda, const Eigen::VectorXcd& y,
                            const DeconvolutionOptions& options) {
    return deconvolve_impl<cd>(lambda, y, options);
}

namespace {

void check_sampling(const Kernel& lambda, const BoundaryTrace& y) {
    require(std::abs(lambda.dt - y.dt) <= 1e-12 * y.dt, "kernel and trace use different dt");
}

}  // namespace

BoundaryTrace deconvolve(const Kernel& lambda, const BoundaryTrace& y,
                         const DeconvolutionOptions& options) {
    check_sampling(lambda, y);
    require(!lambda.is_complex(), "complex kernel needs the complex trace overload");
    BoundaryTrace out = y;
    for (Eigen::Index c = 0; c < y.values.cols(); ++c) {
        out.values.col(c) = deconvolve(lambda, Eigen::VectorXd(y.values.col(c)), options);
    }
    return out;
}

ComplexTrace deconvolve(const Kernel& lambda, const ComplexTrace& y,
                        const DeconvolutionOptions& options) {
    check_sampling(lambda, y.re);
    require(y.re.values.rows() == y.im.values.rows() && y.re.values.cols() == y.im.values.cols(),
            "real and imaginary traces differ in shape");
    ComplexTrace out = y;
    for (Eigen::Index c = 0; c < y.re.values.cols(); ++c) {
        const Eigen::VectorXcd col =
            y.re.values.col(c).cast<cd>() + cd(0.0, 1.0) * y.im.values.col(c).cast<cd>();
        const Eigen::VectorXcd h = deconvolve(lambda, col, options);
        out.re.values.col(c) = h.real();
        out.im.values.col(c) = h.imag();
    }
    return out;
}

BoundaryTrace convolve(const Kernel& lambda, const BoundaryTrace& h) {
    check_sampling(lambda, h);
    BoundaryTrace out = h;
    for (Eigen::Index c = 0; c < h.values.cols(); ++c) {
        out.values.col(c) = convolve(lambda, Eigen::VectorXd(h.values.col(c)));
    }
    return out;
}

Eigen::VectorXcd moving_average(const Eigen::VectorXcd& y, std::size_t width) {
    require(width % 2 == 1, "moving-average width must be odd");
    const auto n = y.size();
    const auto half = static_cast<Eigen::Index>(width / 2);
    Eigen::VectorXcd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = std::min({half, i, n - 1 - i});
        out(i) = y.segment(i - r, 2 * r + 1).mean();
    }
    return out;
}

double kernel_derivative_norm_sq(const Kernel& lambda, double tau) {
    const std::size_t count = step_count(tau, lambda.dt);
    require(lambda.size() >= count, "kernel does not cover (0, tau)");
    const Eigen::VectorXcd d = kernel_derivative(samples<cd>(lambda), lambda.dt);
    const auto tw = time_weights(count, lambda.dt);
    double s = 0.0;
    for (std::size_t n = 0; n < count; ++n) s += tw[n] * std::norm(d(static_cast<Eigen::Index>(n)));
    return s;
}

double amplification_constant(const Kernel& lambda, double tau, double kappa) {
    require(kappa > 0.0, "observability constant must be positive");
    const double l0 = std::abs(lambda.at(0));
    require(l0 >= 1e-12, "kernel with lambda(0) = 0 is rejected (ill-posed)");
    return std::sqrt(2.0) / (kappa * l0) *
           std::exp(tau * kernel_derivative_norm_sq(lambda, tau) / (l0 * l0));
}

double dual_norm_amplification(const Kernel& lambda, double tau, double kappa_tilde) {
    require(kappa_tilde > 0.0, "dual observability constant must be positive");
    const double l0 = std::abs(lambda.at(0));
    require(l0 >= 1e-12, "kernel with lambda(0) = 0 is rejected (ill-posed)");
    return kappa_tilde * l0 * std::exp(tau * kernel_derivative_norm_sq(lambda, tau) / (l0 * l0));
}

}  // namespace obslab
