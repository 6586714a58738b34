#include "obslab/domain/series.hpp"

#include <algorithm>
#include <cmath>

#include "obslab/errors.hpp"

namespace obslab {

std::size_t step_count(double tau, double dt) {
    require(tau > 0.0 && dt > 0.0, "tau and dt must be positive");
    return static_cast<std::size_t>(std::floor(tau / dt + 1e-9)) + 1;
}

Kernel::Kernel(double dt_, std::vector<double> re_, std::vector<double> im_)
    : dt(dt_), re(std::move(re_)), im(std::move(im_)) {
    require(dt > 0.0, "kernel dt must be positive");
    require(re.size() >= 2, "kernel needs at least 2 samples");
    require(im.empty() || im.size() == re.size(), "kernel real/imaginary length mismatch");
}

Kernel Kernel::sample(const std::function<double(double)>& f, double dt, std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t n = 0; n < count; ++n) v[n] = f(static_cast<double>(n) * dt);
    return Kernel(dt, std::move(v));
}

Kernel Kernel::sample_complex(const std::function<std::complex<double>(double)>& f, double dt,
                              std::size_t count) {
    std::vector<double> r(count), i(count);
    for (std::size_t n = 0; n < count; ++n) {
        const auto z = f(static_cast<double>(n) * dt);
        r[n] = z.real();
        i[n] = z.imag();
    }
    return Kernel(dt, std::move(r), std::move(i));
}

namespace {
double interpolate_samples(const std::vector<double>& v, double dt, double t) {
    if (v.empty()) return 0.0;
    const double s = std::max(t, 0.0) / dt;
    const auto n = static_cast<std::size_t>(s);
    if (n + 1 >= v.size()) return v.back();
    const double frac = s - static_cast<double>(n);
    if (frac < 1e-12) return v[n];
    return (1.0 - frac) * v[n] + frac * v[n + 1];
}
}  // namespace

double Kernel::real_at(double t) const { return interpolate_samples(re, dt, t); }
double Kernel::imag_at(double t) const { return interpolate_samples(im, dt, t); }

Kernel Kernel::imag_part() const {
    return Kernel(dt, im.empty() ? std::vector<double>(re.size(), 0.0) : im);
}

Kernel Kernel::scaled(double c) const {
    Kernel out = *this;
    for (double& v : out.re) v *= c;
    for (double& v : out.im) v *= c;
    return out;
}

BoundaryTrace operator-(const BoundaryTrace& a, const BoundaryTrace& b) {
    require(a.label == b.label && a.nodes == b.nodes, "traces live on different boundaries");
    require(std::abs(a.dt - b.dt) <= 1e-12 * a.dt && a.steps() == b.steps(),
            "traces have different time sampling");
    BoundaryTrace out = a;
    out.values = a.values - b.values;
    return out;
}

std::vector<double> time_weights(std::size_t count, double dt) {
    std::vector<double> w(count, dt);
    if (count > 0) {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    return w;
}

namespace {
template <class Vec>
Vec derivative_impl(const Vec& y, double dt) {
    const auto n = y.size();
    Vec d(n);
    if (n == 2) {
        d(0) = d(1) = (y(1) - y(0)) / dt;
        return d;
    }
    d(0) = (-3.0 * y(0) + 4.0 * y(1) - y(2)) / (2.0 * dt);
    for (Eigen::Index k = 1; k + 1 < n; ++k) d(k) = (y(k + 1) - y(k - 1)) / (2.0 * dt);
    d(n - 1) = (3.0 * y(n - 1) - 4.0 * y(n - 2) + y(n - 3)) / (2.0 * dt);
    return d;
}
}  // namespace

Eigen::VectorXd time_derivative(const Eigen::VectorXd& samples, double dt) {
    require(samples.size() >= 2, "derivative needs at least 2 samples");
    return derivative_impl(samples, dt);
}

Eigen::VectorXcd time_derivative(const Eigen::VectorXcd& samples, double dt) {
    require(samples.size() >= 2, "derivative needs at least 2 samples");
    return derivative_impl(samples, dt);
}

double trace_l2_norm(const Eigen::MatrixXd& values, double dt, const std::vector<double>& bw) {
    const auto tw = time_weights(static_cast<std::size_t>(values.rows()), dt);
    double s = 0.0;
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            s += tw[r] * bw[c] * values(r, c) * values(r, c);
        }
    }
    return std::sqrt(s);
}

double trace_h1_norm(const Eigen::MatrixXd& values, double dt, const std::vector<double>& bw) {
    Eigen::MatrixXd deriv(values.rows(), values.cols());
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        deriv.col(c) = time_derivative(Eigen::VectorXd(values.col(c)), dt);
    }
    const double a = trace_l2_norm(values, dt, bw);
    const double b = trace_l2_norm(deriv, dt, bw);
    return std::sqrt(a * a + b * b);
}

double series_l2_norm(const Eigen::VectorXcd& y, double dt) {
    const auto tw = time_weights(static_cast<std::size_t>(y.size()), dt);
    double s = 0.0;
    for (Eigen::Index k = 0; k < y.size(); ++k) s += tw[k] * std::norm(y(k));
    return std::sqrt(s);
}

double series_h1_norm(const Eigen::VectorXcd& y, double dt) {
    const double a = series_l2_norm(y, dt);
    const double b = series_l2_norm(time_derivative(y, dt), dt);
    return std::sqrt(a * a + b * b);
}

}  // namespace obslab
