#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "obslab/domain/grid.hpp"

namespace obslab {

/// Number of uniform samples covering [0, tau] with step dt, t = 0 included.
std::size_t step_count(double tau, double dt);

/// Uniform time samples of a scalar function such as lambda(t) or g(t).
/// Complex kernels keep the imaginary part in `im`; real kernels leave it empty.
struct Kernel {
    double dt = 0.0;
    std::vector<double> re;
    std::vector<double> im;

    Kernel() = default;
    Kernel(double dt, std::vector<double> re, std::vector<double> im = {});

    static Kernel sample(const std::function<double(double)>& f, double dt, std::size_t count);
    static Kernel sample_complex(const std::function<std::complex<double>(double)>& f, double dt,
                                 std::size_t count);

    bool is_complex() const { return !im.empty(); }
    std::size_t size() const { return re.size(); }
    std::complex<double> at(std::size_t n) const {
        return {re[n], im.empty() ? 0.0 : im[n]};
    }
    /// Real part at time t by linear interpolation (held constant past the end).
    double real_at(double t) const;
    double imag_at(double t) const;
    Kernel real_part() const { return Kernel(dt, re); }
    Kernel imag_part() const;
    Kernel scaled(double c) const;
};

/// Neumann data on a labelled boundary subset: row n is time n*dt, column b
/// is boundary node nodes[b].
struct BoundaryTrace {
    BoundaryLabel label = BoundaryLabel::All;
    double dt = 0.0;
    std::vector<std::size_t> nodes;
    Eigen::MatrixXd values;

    std::size_t steps() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t width() const { return static_cast<std::size_t>(values.cols()); }
};

/// Complex trace stored as two real traces sharing label, dt and nodes.
struct ComplexTrace {
    BoundaryTrace re;
    BoundaryTrace im;
};

BoundaryTrace operator-(const BoundaryTrace& a, const BoundaryTrace& b);

/// Trapezoid weights in time for `count` samples of step dt.
std::vector<double> time_weights(std::size_t count, double dt);

/// Second-order derivative of uniform samples: centred inside, one-sided
/// three-point stencils at both ends.
Eigen::VectorXd time_derivative(const Eigen::VectorXd& samples, double dt);
Eigen::VectorXcd time_derivative(const Eigen::VectorXcd& samples, double dt);

/// L2((0,tau); L2(boundary)) norm with boundary quadrature weights `bw`.
double trace_l2_norm(const Eigen::MatrixXd& values, double dt, const std::vector<double>& bw);
/// H1((0,tau); L2(boundary)) norm: sqrt(||y||^2 + ||y'||^2).
double trace_h1_norm(const Eigen::MatrixXd& values, double dt, const std::vector<double>& bw);

/// Scalar-series versions with unit boundary weight.
double series_l2_norm(const Eigen::VectorXcd& y, double dt);
double series_h1_norm(const Eigen::VectorXcd& y, double dt);

}  // namespace obslab
