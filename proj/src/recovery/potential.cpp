#include "obslab/recovery/potential.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "obslab/domain/norms.hpp"
#include "obslab/errors.hpp"
#include "obslab/forward/trace.hpp"
#include "obslab/forward/wave.hpp"
#include "obslab/inequality/inequality.hpp"
#include "obslab/parallel.hpp"
#include "obslab/stability/modulus.hpp"
#include "obslab/volterra/volterra.hpp"
#include "spectral_fit.hpp"

namespace obslab {

namespace {

using detail::Propagator;

double integral(const Field& f) {
    const auto w = f.grid.quadrature_weights();
    double s = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) s += w[n] * f[n];
    return s;
}

Field expand(const EigenBasis& basis, const Eigen::VectorXd& c) {
    Field f = Field::zeros(basis.potential.grid);
    for (Eigen::Index k = 0; k < c.size(); ++k) f = f + c(k) * basis.functions[static_cast<std::size_t>(k)];
    return f;
}

// Sign of each probe relative to the basis; rejects probes that are not
// basis functions of the inversion grid.
std::vector<double> probe_signs(const ProbeResponseSet& data, const EigenBasis& basis,
                                std::size_t count) {
    require(data.size() >= count, "fewer probe responses than the configured probe count");
    std::vector<double> signs;
    for (std::size_t k = 0; k < count; ++k) {
        const Field& u0 = data.probes[k].u0;
        require(u0.grid == basis.potential.grid,
                "probe " + data.probes[k].id + " is not sampled on the inversion grid");
        const double c = inner(u0, basis.functions[k]) / std::max(norm(u0, NormKind::L2), 1e-300);
        if (std::abs(c) < 0.99) {
            throw InputError("probe/basis mismatch: probe " + data.probes[k].id +
                             " is not eigenfunction " + std::to_string(k + 1) +
                             " of the reference operator (correlation " + std::to_string(c) + ")");
        }
        signs.push_back(c > 0 ? 1.0 : -1.0);
    }
    return signs;
}

double response_distance(const ProbeResponseSet& data, std::size_t count, const Grid& grid) {
    double sup = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        double d = data_norm(data.kind, data.responses[k].re, grid);
        if (data.responses[k].im) d = std::hypot(d, data_norm(data.kind, *data.responses[k].im, grid));
        sup = std::max(sup, d / probe_norm(data.kind, data.probes[k]));
    }
    return sup;
}

struct ProbeFit {
    bool ok = false;
    std::string error;
    double value = 0.0;
    double residual = 0.0;
    double condition = 0.0;
    double bound = 0.0;
};

}  // namespace

RecoveryResult recover_potential_heat(const Field& q_ref, const ProbeResponseSet& data,
                                      const RecoveryConfig& config, unsigned threads) {
    config.validate();
    require(data.kind == MapKind::Heat, "heat potential recovery needs heat responses");
    const Grid& grid = q_ref.grid;
    const int dim = grid.dimension();
    const std::size_t K = config.probes;
    const std::size_t l = config.retained_modes();
    const double eps = epsilon_from_s(config.s, dim);
    const std::size_t wanted = heat_mode_count(eps, dim);
    const std::size_t J = std::min(wanted, config.max_modes);
    const double shift = std::max(0.0, -q_ref.min());

    const EigenBasis ref = dirichlet_eigenpairs(grid, q_ref, std::max(K, J));
    const auto signs = probe_signs(data, ref, K);
    const double dt = data.dt;
    const std::size_t steps = data.responses[0].re.steps();
    const double tau = static_cast<double>(steps - 1) * dt;
    const BoundaryLabel label = data.responses[0].re.label;
    const auto& nodes = data.responses[0].re.nodes;
    const auto bw = grid.boundary_weights(label);
    const double perim = detail::perimeter(bw);
    const double noise_h = detail::derivative_noise(config.noise_level, tau, perim, dt);
    const double noise_h1 =
        config.noise_level * std::sqrt(tau * perim) * std::sqrt(1.0 + 1.0 / (2.0 * dt * dt));

    std::vector<Eigen::MatrixXd> shifted(l);
    for (std::size_t k = 0; k < l; ++k) {
        shifted[k] = data.responses[k].re.values;
        for (std::size_t n = 0; n < steps; ++n) {
            shifted[k].row(static_cast<Eigen::Index>(n)) *= std::exp(-shift * static_cast<double>(n) * dt);
        }
    }

    RecoveryResult out;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l));
    std::vector<ProbeFit> fits(l);
    const std::size_t sweeps = std::max<std::size_t>(1, config.outer_iterations);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        const EigenBasis basis =
            sweep == 0 ? ref : dirichlet_eigenpairs(grid, q_ref + expand(ref, m), J);
        std::vector<double> lambdas(J);
        for (std::size_t j = 0; j < J; ++j) lambdas[j] = basis.values[j] + shift;
        const Eigen::MatrixXd traces = detail::mode_traces(basis, label, nodes, J);
        const auto columns = detail::analytic_columns(steps, dt, lambdas, traces, Propagator::Decay);
        parallel_for(l, threads, [&](std::size_t k) {
            ProbeFit pf;
            try {
                const double lk = ref.values[k] + shift;
                const Kernel g = Kernel::sample([&](double t) { return std::exp(-lk * t); }, dt, steps);
                DeconvolutionOptions dopt;
                dopt.smoothing_width = config.smoothing_width;
                BoundaryTrace y = data.responses[k].re;
                y.values = shifted[k];
                const BoundaryTrace h = deconvolve(g, y, dopt);
                const auto fit = detail::fit_columns(h.values, dt, bw, columns, noise_h,
                                                     config.regularization, config.condition_limit);
                // w(0) = -(q - q_ref) * probe, so m_k = -sign_k int w(0).
                pf.value = -signs[k] * integral(expand(basis, fit.coeff));
                pf.residual = fit.ls.residual;
                pf.condition = fit.ls.condition;
                BoundaryTrace predicted = h;
                predicted.values = detail::combine(columns, fit.coeff);
                predicted = convolve(g, predicted);
                const double misfit = trace_h1_norm(y.values - predicted.values, dt, bw);
                const double model = detail::model_error(fit.coeff, basis, label, nodes, steps, dt,
                                                         Propagator::Decay);
                pf.bound = amplification_constant(g, tau, fit.kappa) * (misfit + noise_h1) +
                           model / fit.kappa;
                pf.ok = true;
            } catch (const std::exception& e) {
                pf.error = e.what();
            }
            fits[k] = pf;
        });
        for (std::size_t k = 0; k < l; ++k) m(k) = fits[k].ok ? fits[k].value : 0.0;
    }

    double bound_sq = 0.0;
    double worst_condition = 0.0;
    for (std::size_t k = 0; k < l; ++k) {
        if (!fits[k].ok) {
            out.flags.push_back("probe " + std::to_string(k + 1) + " skipped: " + fits[k].error);
            bound_sq = std::numeric_limits<double>::infinity();
        } else {
            bound_sq += fits[k].bound * fits[k].bound;
            worst_condition = std::max(worst_condition, fits[k].condition);
        }
        out.modes.push_back({k + 1, m(k), fits[k].residual});
    }
    if (wanted > J) {
        out.flags.push_back("source fits capped at " + std::to_string(J) + " of " +
                            std::to_string(wanted) + " modes");
    }
    if (shift > 0.0) out.flags.push_back("reference potential shifted by " + std::to_string(shift));
    const Field perturbation = expand(ref, m);
    out.fields.emplace_back("q", q_ref + perturbation);
    out.fields.emplace_back("perturbation", perturbation);
    out.bound = std::sqrt(bound_sq);
    out.bound_note =
        "L2 error of the retained coefficients m_k, from per-probe amplification constants "
        "and dictionary discretization error";

    const double rho = response_distance(data, K, grid);
    const auto theta = StabilityModulus::theta(dim);
    const double theta_value = modulus_eval(theta, std::min(rho, modulus_domain_limit()));
    const double pnorm = norm(perturbation, NormKind::L2);
    out.diagnostics["epsilon"] = eps;
    out.diagnostics["level"] = static_cast<double>(l);
    out.diagnostics["heat_modes"] = static_cast<double>(J);
    out.diagnostics["condition_number"] = worst_condition;
    out.diagnostics["shift"] = shift;
    out.diagnostics["outer_iterations"] = static_cast<double>(sweeps);
    out.diagnostics["distance"] = rho;
    out.diagnostics["theta_power"] = theta.parameter;
    out.diagnostics["theta"] = theta_value;
    out.diagnostics["perturbation_l2"] = pnorm;
    out.diagnostics["theta_ratio"] = theta_value > 0.0 ? pnorm / theta_value : 0.0;
    return out;
}

namespace {

// Pointwise least squares over probes of field * phi_k = products_k, with
// division only where sum_k phi_k^2 >= theta^2 max; elsewhere the values of
// the best fit in span{phi_1..phi_l} are used.
Field divide_by_probes(const std::vector<Field>& products, const EigenBasis& ref, std::size_t l,
                       double theta) {
    const Grid& grid = ref.potential.grid;
    const std::size_t K = products.size();
    std::vector<double> den(grid.size(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t n = 0; n < grid.size(); ++n) den[n] += ref.functions[k][n] * ref.functions[k][n];
    }
    const double cut = theta * theta * *std::max_element(den.begin(), den.end());

    const auto w = grid.quadrature_weights();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(K * grid.size()), static_cast<Eigen::Index>(l));
    Eigen::VectorXd b(a.rows());
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const auto row = static_cast<Eigen::Index>(k * grid.size() + n);
            const double sw = std::sqrt(w[n]);
            b(row) = sw * products[k][n];
            for (std::size_t m = 0; m < l; ++m) {
                a(row, static_cast<Eigen::Index>(m)) = sw * ref.functions[k][n] * ref.functions[m][n];
            }
        }
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);

    Field out = Field::zeros(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (den[n] >= cut && den[n] > 0.0) {
            double num = 0.0;
            for (std::size_t k = 0; k < K; ++k) num += products[k][n] * ref.functions[k][n];
            out.values[n] = num / den[n];
        } else {
            double v = 0.0;
            for (std::size_t m = 0; m < l; ++m) v += c(static_cast<Eigen::Index>(m)) * ref.functions[m][n];
            out.values[n] = v;
        }
    }
    return out;
}

// Traces of w_tt - Delta w + q w + a w_t = 0, w(0) = 0, w_t(0) = phi_j.
std::vector<Eigen::MatrixXd> numeric_columns(const EigenBasis& ref, std::size_t count,
                                             const Field& q, const Field& a, BoundaryLabel label,
                                             std::size_t steps, double dt, unsigned threads) {
    const Grid& grid = ref.potential.grid;
    const double tau = static_cast<double>(steps - 1) * dt;
    std::vector<Eigen::MatrixXd> cols(count);
    parallel_for(count, threads, [&](std::size_t j) {
        TraceRecorder rec(grid, label, dt, steps);
        SolveOptions opt;
        opt.keep_history = false;
        opt.observer = rec.observer();
        solve_wave(grid, q, a, Field::zeros(grid), ref.functions[j], std::nullopt, tau, dt, opt);
        cols[j] = rec.take().values;
    });
    return cols;
}

}  // namespace

RecoveryResult recover_potential_damping_wave(const Field& q_ref, const ProbeResponseSet& data,
                                              const RecoveryConfig& config, unsigned threads) {
    config.validate();
    require(data.kind == MapKind::Wave, "potential/damping recovery needs wave responses");
    const Grid& grid = q_ref.grid;
    const std::size_t K = config.probes;
    const std::size_t l = config.retained_modes();
    const std::size_t J = std::min(config.max_modes, grid.interior_nodes().size());
    require(J >= K, "dictionary smaller than the probe count");
    for (std::size_t k = 0; k < K; ++k) {
        require(data.responses[k].im.has_value(), "probe " + data.responses[k].id +
                                                      " has no imaginary response; complex probes required");
    }
    const EigenBasis ref = dirichlet_eigenpairs(grid, q_ref, J);
    require(ref.values[0] > 0.0, "reference operator must be positive for the complex probes");
    const auto signs = probe_signs(data, ref, K);
    const double dt = data.dt;
    const std::size_t steps = data.responses[0].re.steps();
    const double tau = static_cast<double>(steps - 1) * dt;
    const BoundaryLabel label = data.responses[0].re.label;
    const auto& nodes = data.responses[0].re.nodes;
    const auto bw = grid.boundary_weights(label);
    const double perim = detail::perimeter(bw);
    const double noise_h = detail::derivative_noise(config.noise_level, tau, perim, dt);
    const double noise_h1 =
        config.noise_level * std::sqrt(2.0 * tau * perim) * std::sqrt(1.0 + 1.0 / (2.0 * dt * dt));

    Field dq = Field::zeros(grid);
    Field da = Field::zeros(grid);
    std::vector<double> residuals(K, 0.0), bounds(K, 0.0), conditions(K, 0.0);
    double re_norm = 0.0, im_norm = 0.0;
    const std::size_t sweeps = std::max<std::size_t>(1, config.outer_iterations);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        std::vector<Eigen::MatrixXd> columns;
        if (sweep == 0) {
            const std::vector<double> lambdas(ref.values.begin(), ref.values.begin() + static_cast<long>(J));
            columns = detail::analytic_columns(steps, dt, lambdas,
                                               detail::mode_traces(ref, label, nodes, J),
                                               Propagator::Velocity);
        } else {
            columns = numeric_columns(ref, J, q_ref + dq, da, label, steps, dt, threads);
        }
        std::vector<Field> p_re(K), p_im(K);
        std::vector<double> nre(K), nim(K);
        parallel_for(K, threads, [&](std::size_t k) {
            const double w = std::sqrt(ref.values[k]);
            const Kernel g = Kernel::sample_complex(
                [&](double t) { return std::exp(std::complex<double>(0.0, w * t)); }, dt, steps);
            DeconvolutionOptions dopt;
            dopt.smoothing_width = config.smoothing_width;
            const ComplexTrace y{data.responses[k].re, *data.responses[k].im};
            const ComplexTrace h = deconvolve(g, y, dopt);
            const auto fr = detail::fit_columns(h.re.values, dt, bw, columns, noise_h / std::sqrt(2.0),
                                                config.regularization, config.condition_limit);
            const auto fi = detail::fit_columns(h.im.values, dt, bw, columns, noise_h / std::sqrt(2.0),
                                                config.regularization, config.condition_limit);
            // w_t(0) = -[(q - q_ref) + i sqrt(lambda) a] * probe.
            p_re[k] = (-signs[k]) * expand(ref, fr.coeff);
            p_im[k] = (-signs[k] / w) * expand(ref, fi.coeff);
            nre[k] = norm(p_re[k], NormKind::L2);
            nim[k] = w * norm(p_im[k], NormKind::L2);
            residuals[k] = std::hypot(fr.ls.residual, fi.ls.residual);
            conditions[k] = std::max(fr.ls.condition, fi.ls.condition);

            Eigen::MatrixXcd pred(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(nodes.size()));
            const Eigen::MatrixXd cr = detail::combine(columns, fr.coeff);
            const Eigen::MatrixXd ci = detail::combine(columns, fi.coeff);
            for (Eigen::Index c = 0; c < pred.cols(); ++c) {
                const Eigen::VectorXcd hc = cr.col(c).cast<std::complex<double>>() +
                                            std::complex<double>(0.0, 1.0) * ci.col(c).cast<std::complex<double>>();
                pred.col(c) = convolve(g, hc);
            }
            const double mr = trace_h1_norm(y.re.values - pred.real(), dt, bw);
            const double mi = trace_h1_norm(y.im.values - pred.imag(), dt, bw);
            const double kappa = std::min(fr.kappa, fi.kappa);
            const double model = detail::model_error(fr.coeff, ref, label, nodes, steps, dt, Propagator::Velocity) +
                                 detail::model_error(fi.coeff, ref, label, nodes, steps, dt, Propagator::Velocity);
            bounds[k] = amplification_constant(g, tau, kappa) * (std::hypot(mr, mi) + noise_h1) +
                        model / kappa;
        });
        dq = divide_by_probes(p_re, ref, l, config.theta);
        da = divide_by_probes(p_im, ref, l, config.theta);
        re_norm = 0.0;
        im_norm = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            re_norm += nre[k];
            im_norm += nim[k];
        }
    }

    RecoveryResult out;
    out.fields.emplace_back("q", q_ref + dq);
    out.fields.emplace_back("a", da);
    std::vector<double> qc;
    for (std::size_t m = 0; m < l; ++m) {
        out.modes.push_back({m + 1, inner(da, ref.functions[m]), m < K ? residuals[m] : 0.0});
        qc.push_back(inner(dq, ref.functions[m]));
    }
    out.series["q_coefficients"] = qc;
    out.series["probe_bounds"] = bounds;
    out.bound = *std::max_element(bounds.begin(), bounds.end());
    out.bound_note =
        "L2 error of the recovered sources G_k (max over probes), before division by phi_k";

    const double rho = response_distance(data, K, grid);
    out.diagnostics["distance"] = rho;
    out.diagnostics["holder_half"] = std::sqrt(rho);
    out.diagnostics["imag_to_real"] = re_norm > 0.0 ? im_norm / re_norm : 0.0;
    out.diagnostics["real_to_imag"] = im_norm > 0.0 ? re_norm / im_norm : 0.0;
    out.diagnostics["condition_number"] = *std::max_element(conditions.begin(), conditions.end());
    out.diagnostics["outer_iterations"] = static_cast<double>(sweeps);
    out.diagnostics["theta"] = config.theta;
    const Field& phi1 = ref.functions[0];
    const double weighted = norm(hadamard(da, phi1), NormKind::L2);
    out.diagnostics["a_phi1_l2"] = weighted;
    out.diagnostics["a_h2"] = norm(da, NormKind::H2);
    if (weighted > 0.0) {
        const double cu = interpolation_constant(da, phi1);
        out.diagnostics["interpolation_constant"] = cu;
        out.diagnostics["interpolation_bound"] = cu * std::sqrt(weighted * norm(da, NormKind::H2));
    } else {
        out.flags.push_back("interpolation certificate skipped: recovered damping vanishes");
    }
    return out;
}

}  // namespace obslab
