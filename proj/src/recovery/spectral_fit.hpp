#pragma once

#include <Eigen/Dense>

#include "obslab/domain/spectral.hpp"
#include "obslab/domain/series.hpp"
#include "obslab/recovery/least_squares.hpp"

namespace obslab::detail {

enum class Propagator {
    Velocity,  ///< sin(omega t) / omega
    Decay,     ///< exp(-lambda t)
};

double profile(Propagator p, double lambda, double t);

/// Normal derivatives of the first `count` basis functions at the trace nodes;
/// row k is mode k.
Eigen::MatrixXd mode_traces(const EigenBasis& basis, BoundaryLabel label,
                            const std::vector<std::size_t>& nodes, std::size_t count);

struct ModalFit {
    Eigen::VectorXd coeff;
    Eigen::VectorXd mode_residual;  ///< |column_k . r| / ||column_k||
    TikhonovResult ls;
    double kappa = 0.0;             ///< smallest singular value of the weighted dictionary
};

/// Weighted (trapezoid in time and on the boundary) Tikhonov fit of samples
/// h(t_n, node_b) against profile(lambda_k, t) * traces(k, b).
ModalFit fit_modes(const Eigen::MatrixXd& h, double dt, const std::vector<double>& bw,
                   const std::vector<double>& lambdas, const Eigen::MatrixXd& traces,
                   Propagator propagator, double noise, double floor, double condition_limit);

/// Same fit against explicit dictionary columns (rows in time, cols nodes).
ModalFit fit_columns(const Eigen::MatrixXd& h, double dt, const std::vector<double>& bw,
                     const std::vector<Eigen::MatrixXd>& columns, double noise, double floor,
                     double condition_limit);

/// Column k of the analytic dictionary: profile(lambda_k, t) traces(k, .).
std::vector<Eigen::MatrixXd> analytic_columns(std::size_t steps, double dt,
                                              const std::vector<double>& lambdas,
                                              const Eigen::MatrixXd& traces, Propagator propagator);

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& columns, const Eigen::VectorXd& coeff);

/// Samples sum_k c_k profile(lambda_k, t) traces(k, .), rows in time.
Eigen::MatrixXd synthesize(const Eigen::VectorXd& coeff, std::size_t steps, double dt,
                           const std::vector<double>& lambdas, const Eigen::MatrixXd& traces,
                           Propagator propagator);

/// Estimated discretization error of the dictionary in the weighted trace
/// norm for coefficients `coeff`: Richardson (h vs 2h) for the trace stencil
/// and lambda^2 h^2 / 12 for the eigenvalues. Returns 0 with `available`
/// false when the grid cannot be coarsened by 2.
double model_error(const Eigen::VectorXd& coeff, const EigenBasis& basis, BoundaryLabel label,
                   const std::vector<std::size_t>& nodes, std::size_t steps, double dt,
                   Propagator propagator, bool* available = nullptr);

/// Expected L2 norm of the centred time derivative of white trace noise.
double derivative_noise(double sigma, double tau, double perimeter, double dt);

double perimeter(const std::vector<double>& bw);

}  // namespace obslab::detail
