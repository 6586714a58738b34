#include "spectral_fit.hpp"

#include <cmath>

#include "obslab/errors.hpp"
#include "obslab/forward/trace.hpp"

namespace obslab::detail {

double profile(Propagator p, double lambda, double t) {
    if (p == Propagator::Decay) return std::exp(-lambda * t);
    if (lambda > 1e-14) {
        const double w = std::sqrt(lambda);
        return std::sin(w * t) / w;
    }
    if (lambda < -1e-14) {
        const double w = std::sqrt(-lambda);
        return std::sinh(w * t) / w;
    }
    return t;
}

Eigen::MatrixXd mode_traces(const EigenBasis& basis, BoundaryLabel label,
                            const std::vector<std::size_t>& nodes, std::size_t count) {
    require(count <= basis.size(), "dictionary needs more modes than the basis holds");
    const Grid& grid = basis.potential.grid;
    TraceStencil stencil(grid, label);
    require(stencil.nodes() == nodes, "trace nodes do not match the basis grid");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < count; ++k) out.row(k) = stencil.apply(basis.functions[k]);
    return out;
}

std::vector<Eigen::MatrixXd> analytic_columns(std::size_t steps, double dt,
                                              const std::vector<double>& lambdas,
                                              const Eigen::MatrixXd& traces, Propagator propagator) {
    std::vector<Eigen::MatrixXd> cols;
    for (Eigen::Index k = 0; k < traces.rows(); ++k) {
        Eigen::MatrixXd c(static_cast<Eigen::Index>(steps), traces.cols());
        for (std::size_t n = 0; n < steps; ++n) {
            const double t = static_cast<double>(n) * dt;
            c.row(static_cast<Eigen::Index>(n)) =
                profile(propagator, lambdas[static_cast<std::size_t>(k)], t) * traces.row(k);
        }
        cols.push_back(std::move(c));
    }
    return cols;
}

Eigen::MatrixXd combine(const std::vector<Eigen::MatrixXd>& columns, const Eigen::VectorXd& coeff) {
    require(!columns.empty() && static_cast<std::size_t>(coeff.size()) <= columns.size(),
            "dictionary combination size mismatch");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(columns[0].rows(), columns[0].cols());
    for (Eigen::Index k = 0; k < coeff.size(); ++k) out += coeff(k) * columns[static_cast<std::size_t>(k)];
    return out;
}

ModalFit fit_columns(const Eigen::MatrixXd& h, double dt, const std::vector<double>& bw,
                     const std::vector<Eigen::MatrixXd>& columns, double noise, double floor,
                     double condition_limit) {
    const auto steps = static_cast<std::size_t>(h.rows());
    const auto width = static_cast<std::size_t>(h.cols());
    const auto modes = columns.size();
    require(modes >= 1 && bw.size() == width, "trace width mismatch");
    const auto tw = time_weights(steps, dt);

    Eigen::MatrixXd a(static_cast<Eigen::Index>(steps * width), static_cast<Eigen::Index>(modes));
    Eigen::VectorXd b(a.rows());
    for (std::size_t k = 0; k < modes; ++k) {
        require(static_cast<std::size_t>(columns[k].rows()) == steps &&
                    static_cast<std::size_t>(columns[k].cols()) == width,
                "dictionary column has the wrong shape");
    }
    for (std::size_t n = 0; n < steps; ++n) {
        for (std::size_t c = 0; c < width; ++c) {
            const auto row = static_cast<Eigen::Index>(n * width + c);
            const double w = std::sqrt(tw[n] * bw[c]);
            b(row) = w * h(n, c);
            for (std::size_t k = 0; k < modes; ++k) a(row, k) = w * columns[k](n, c);
        }
    }
    ModalFit fit;
    fit.ls = tikhonov_solve(a, b, noise, floor, condition_limit);
    fit.coeff = fit.ls.x;
    fit.kappa = fit.ls.singular_values(fit.ls.singular_values.size() - 1);
    const Eigen::VectorXd r = a * fit.coeff - b;
    fit.mode_residual.resize(static_cast<Eigen::Index>(modes));
    for (std::size_t k = 0; k < modes; ++k) {
        const double cn = a.col(k).norm();
        fit.mode_residual(k) = cn > 0.0 ? std::abs(a.col(k).dot(r)) / cn : 0.0;
    }
    return fit;
}

ModalFit fit_modes(const Eigen::MatrixXd& h, double dt, const std::vector<double>& bw,
                   const std::vector<double>& lambdas, const Eigen::MatrixXd& traces,
                   Propagator propagator, double noise, double floor, double condition_limit) {
    require(traces.cols() == h.cols(), "trace width mismatch");
    return fit_columns(h, dt, bw,
                       analytic_columns(static_cast<std::size_t>(h.rows()), dt, lambdas, traces,
                                        propagator),
                       noise, floor, condition_limit);
}

Eigen::MatrixXd synthesize(const Eigen::VectorXd& coeff, std::size_t steps, double dt,
                           const std::vector<double>& lambdas, const Eigen::MatrixXd& traces,
                           Propagator propagator) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps), traces.cols());
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        for (Eigen::Index k = 0; k < coeff.size(); ++k) {
            out.row(n) += coeff(k) * profile(propagator, lambdas[k], t) * traces.row(k);
        }
    }
    return out;
}

double model_error(const Eigen::VectorXd& coeff, const EigenBasis& basis, BoundaryLabel label,
                   const std::vector<std::size_t>& nodes, std::size_t steps, double dt,
                   Propagator propagator, bool* available) {
    const Grid& grid = basis.potential.grid;
    const bool even = (grid.nx() - 1) % 2 == 0 && (grid.dimension() == 1 || (grid.ny() - 1) % 2 == 0);
    if (available != nullptr) *available = even;
    if (!even || grid.nx() < 9) return 0.0;
    const Grid coarse = grid.dimension() == 1 ? Grid::interval((grid.nx() + 1) / 2)
                                              : Grid::square((grid.nx() + 1) / 2, (grid.ny() + 1) / 2);
    TraceStencil fine_stencil(grid, label);
    TraceStencil coarse_stencil(coarse, label);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t c = 0; c < coarse_stencil.nodes().size(); ++c) {
        const auto cn = coarse_stencil.nodes()[c];
        const auto fn = grid.index(coarse.i_of(cn) * 2, coarse.j_of(cn) * 2);
        for (std::size_t f = 0; f < nodes.size(); ++f) {
            if (nodes[f] == fn) pairs.emplace_back(f, c);
        }
    }
    const auto bw = grid.boundary_weights(label);
    const auto tw = time_weights(steps, dt);
    const double h = grid.hx();
    double total = 0.0;
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
        if (coeff(k) == 0.0) continue;
        const Field& phi = basis.functions[static_cast<std::size_t>(k)];
        const Eigen::RowVectorXd tf = fine_stencil.apply(phi);
        const Eigen::RowVectorXd tc = coarse_stencil.apply(phi.restrict_to(coarse));
        double dtrace = 0.0;
        for (auto [f, c] : pairs) dtrace = std::max(dtrace, std::abs(tc(c) - tf(f)) / 3.0);
        const double lam = basis.values[static_cast<std::size_t>(k)];
        const double dlam = lam * lam * h * h / 12.0;
        const double step = 1e-6 * std::max(1.0, std::abs(lam));
        double s = 0.0;
        for (std::size_t n = 0; n < steps; ++n) {
            const double t = static_cast<double>(n) * dt;
            const double p = profile(propagator, lam, t);
            const double dp = (profile(propagator, lam + step, t) - p) / step;
            for (std::size_t b = 0; b < nodes.size(); ++b) {
                const double e = std::abs(p) * dtrace + std::abs(dp) * dlam * std::abs(tf(b));
                s += tw[n] * bw[b] * e * e;
            }
        }
        total += std::abs(coeff(k)) * std::sqrt(s);
    }
    return total;
}

double derivative_noise(double sigma, double tau, double perimeter, double dt) {
    return sigma / (std::sqrt(2.0) * dt) * std::sqrt(tau * perimeter);
}

double perimeter(const std::vector<double>& bw) {
    double s = 0.0;
    for (double w : bw) s += w;
    return s;
}

}  // namespace obslab::detail
