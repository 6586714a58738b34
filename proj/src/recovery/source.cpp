#include "obslab/recovery/source.hpp"

#include <algorithm>
#include <cmath>

#include "obslab/domain/norms.hpp"
#include "obslab/errors.hpp"
#include "obslab/volterra/volterra.hpp"
#include "spectral_fit.hpp"

namespace obslab {

namespace {

using detail::Propagator;

void check_inputs(const Kernel& g, const BoundaryTrace& trace, const EigenBasis& basis) {
    require(basis.size() >= 1, "empty eigenbasis");
    require(trace.steps() >= 3, "trace needs at least 3 time samples");
    require(std::abs(g.dt - trace.dt) <= 1e-12 * trace.dt, "kernel and trace use different dt");
    require(g.size() >= trace.steps(), "kernel does not cover the trace interval");
    require(trace.width() >= 1, "trace has no boundary nodes");
}

RecoveryResult recover(const Kernel& g, const BoundaryTrace& trace, const EigenBasis& basis,
                       const RecoveryConfig& config, Propagator propagator,
                       std::size_t dictionary, std::size_t retained) {
    check_inputs(g, trace, basis);
    const Grid& grid = basis.potential.grid;
    const double dt = trace.dt;
    const auto steps = trace.steps();
    const double tau = static_cast<double>(steps - 1) * dt;

    DeconvolutionOptions dopt;
    dopt.smoothing_width = config.smoothing_width;
    const BoundaryTrace h = deconvolve(g, trace, dopt);

    const auto bw = grid.boundary_weights(trace.label);
    const double perim = detail::perimeter(bw);
    const std::vector<double> lambdas(basis.values.begin(),
                                      basis.values.begin() + static_cast<long>(dictionary));
    const Eigen::MatrixXd traces = detail::mode_traces(basis, trace.label, trace.nodes, dictionary);
    const double g0 = std::abs(g.at(0));
    const double noise_h = detail::derivative_noise(config.noise_level, tau, perim, dt) / g0;
    const auto fit = detail::fit_modes(h.values, dt, bw, lambdas, traces, propagator, noise_h,
                                       config.regularization, config.condition_limit);

    RecoveryResult out;
    Field f = Field::zeros(grid);
    Eigen::VectorXd kept = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dictionary));
    for (std::size_t k = 0; k < retained; ++k) {
        f = f + fit.coeff(k) * basis.functions[k];
        kept(k) = fit.coeff(k);
        out.modes.push_back({k + 1, fit.coeff(k), fit.mode_residual(k)});
    }
    out.fields.emplace_back("f", f);

    BoundaryTrace predicted = h;
    predicted.values = detail::synthesize(kept, steps, dt, lambdas, traces, propagator);
    predicted = convolve(g, predicted);
    const double misfit = trace_h1_norm(trace.values - predicted.values, dt, bw);
    const double noise_h1 = config.noise_level * std::sqrt(tau * perim) *
                            std::sqrt(1.0 + 1.0 / (2.0 * dt * dt));
    const double amp = amplification_constant(g, tau, fit.kappa);
    bool model_ok = false;
    const double model = detail::model_error(kept, basis, trace.label, trace.nodes, steps, dt,
                                             propagator, &model_ok);
    if (!model_ok) out.flags.push_back("dictionary discretization error not estimated");
    out.bound = amp * (misfit + noise_h1) + model / fit.kappa;
    out.bound_note =
        "L2 error of the retained modes: amplification(g, tau, kappa) * (H1 misfit + noise) "
        "+ dictionary discretization error / kappa";

    out.diagnostics["condition_number"] = fit.ls.condition;
    out.diagnostics["tikhonov_weight"] = fit.ls.weight;
    out.diagnostics["kappa"] = fit.kappa;
    out.diagnostics["misfit_h1"] = misfit;
    out.diagnostics["noise_h1"] = noise_h1;
    out.diagnostics["amplification"] = amp;
    out.diagnostics["model_error"] = model;
    out.diagnostics["dictionary_modes"] = static_cast<double>(dictionary);
    out.diagnostics["retained_modes"] = static_cast<double>(retained);
    out.diagnostics["fit_residual"] = fit.ls.residual;
    return out;
}

}  // namespace

RecoveryResult recover_source_wave(const Kernel& g, const BoundaryTrace& trace,
                                   const EigenBasis& basis, const RecoveryConfig& config) {
    config.validate();
    const auto retained = config.retained_modes();
    const auto dictionary = std::max(retained, std::min(basis.size(), config.max_modes));
    require(retained <= basis.size(), "truncation level exceeds the basis size");
    return recover(g, trace, basis, config, Propagator::Velocity, dictionary, retained);
}

RecoveryResult recover_source_heat(const Kernel& g, const BoundaryTrace& trace,
                                   const EigenBasis& basis, const RecoveryConfig& config) {
    config.validate();
    const int dim = basis.potential.grid.dimension();
    const auto wanted = heat_mode_count(config.epsilon, dim);
    const auto retained = std::min({wanted, config.max_modes, basis.size()});
    RecoveryResult out =
        recover(g, trace, basis, config, Propagator::Decay, retained, retained);
    if (retained < wanted) {
        out.flags.push_back("truncation capped at " + std::to_string(retained) + " of " +
                            std::to_string(wanted) + " modes");
    }
    const double tau = static_cast<double>(trace.steps() - 1) * trace.dt;
    std::vector<double> log_sens, sens;
    for (std::size_t k = 0; k < retained; ++k) {
        const double ls = basis.values[k] * tau;
        log_sens.push_back(ls);
        sens.push_back(std::exp(ls));
        if (!(std::exp(ls) <= config.condition_limit)) {
            out.flags.push_back("mode " + std::to_string(k + 1) +
                                " beyond credible conditioning: sensitivity exp(" +
                                std::to_string(ls) + ")");
        }
    }
    out.series["log_sensitivity"] = std::move(log_sens);
    out.series["sensitivity"] = std::move(sens);
    out.diagnostics["epsilon"] = config.epsilon;
    return out;
}

double tail_energy(const Field& f, const EigenBasis& basis, std::size_t l) {
    double s = 0.0;
    for (std::size_t k = l; k < basis.size(); ++k) {
        const double c = inner(f, basis.functions[k]);
        s += c * c;
    }
    return s;
}

}  // namespace obslab
