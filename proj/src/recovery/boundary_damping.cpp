#include "obslab/recovery/boundary_damping.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "obslab/domain/norms.hpp"
#include "obslab/errors.hpp"
#include "obslab/stability/modulus.hpp"

namespace obslab {

void DampingOptions::validate() const {
    require(lower >= 0.0 && upper > lower, "damping bounds must satisfy 0 <= lower < upper");
    require(delta > 0.0, "delta must be positive");
    require(holder_constant > 0.0, "Holder constant must be positive");
    require(control_points >= 2, "need at least 2 control points per edge");
    require(max_iterations >= 1, "max_iterations must be positive");
    require(step_tolerance > 0.0 && misfit_tolerance >= 0.0, "invalid tolerances");
}

namespace {

EdgeDamping to_damping(const Eigen::VectorXd& p, std::size_t points) {
    const Grid edge = Grid::interval(points);
    std::vector<double> a1(points), a2(points);
    for (std::size_t i = 0; i < points; ++i) a1[i] = p(static_cast<Eigen::Index>(i));
    a2[0] = a1[0];
    for (std::size_t i = 1; i < points; ++i) a2[i] = p(static_cast<Eigen::Index>(points - 1 + i));
    return {Field(edge, a1), Field(edge, a2)};
}

double probe_eigenvalue(const std::string& id) {
    int k = -1, l = -1;
    char tail = 0;
    if (std::sscanf(id.c_str(), "phi%d_%d%c", &k, &l, &tail) != 2 || k < 0 || l < 0) {
        throw InputError("probe " + id + " is not a mixed square mode phi<k>_<l>");
    }
    return mixed_square_eigenvalue(k, l);
}

struct Model {
    const Grid& grid;
    const ProbeResponseSet& data;
    std::size_t probes;
    std::size_t points;
    unsigned threads;
    std::vector<double> weights;  // sqrt(tw * bw), row-major (n, b)

    ProbeResponseSet forward(const Eigen::VectorXd& p) const {
        MapCoefficients c = MapCoefficients::zero(grid);
        c.edge = to_damping(p, points);
        const std::vector<Probe> used(data.probes.begin(), data.probes.begin() + static_cast<long>(probes));
        return initial_to_boundary(MapKind::Square, grid, c, used, data.tau, data.dt,
                                   BoundaryLabel::Gamma1, threads);
    }

    Eigen::VectorXd residual(const ProbeResponseSet& pred) const {
        const auto& first = data.responses[0].re.values;
        const Eigen::Index block = first.rows() * first.cols();
        Eigen::VectorXd r(block * static_cast<Eigen::Index>(probes));
        for (std::size_t k = 0; k < probes; ++k) {
            const auto& a = pred.responses[k].re.values;
            const auto& b = data.responses[k].re.values;
            for (Eigen::Index n = 0; n < a.rows(); ++n) {
                for (Eigen::Index c = 0; c < a.cols(); ++c) {
                    const Eigen::Index i = n * a.cols() + c;
                    r(static_cast<Eigen::Index>(k) * block + i) = weights[static_cast<std::size_t>(i)] * (a(n, c) - b(n, c));
                }
            }
        }
        return r;
    }
};

}  // namespace

RecoveryResult recover_boundary_damping(const Grid& grid, const ProbeResponseSet& data,
                                        const RecoveryConfig& config,
                                        const DampingOptions& options, unsigned threads) {
    config.validate();
    options.validate();
    require(grid.dimension() == 2, "boundary damping lives on the square");
    require(data.kind == MapKind::Square, "boundary damping recovery needs square responses");
    const std::size_t K = config.probes;
    require(data.size() >= K, "fewer probe responses than the configured probe count");
    for (std::size_t k = 0; k < K; ++k) {
        require(data.responses[k].re.label == BoundaryLabel::Gamma1, "data must be observed on Gamma1");
        require(data.probes[k].u0.grid == grid, "probe " + data.probes[k].id + " is not on the inversion grid");
    }
    const std::size_t P = options.control_points;
    const auto steps = data.responses[0].re.steps();
    const auto bw = grid.boundary_weights(BoundaryLabel::Gamma1);
    const auto tw = time_weights(steps, data.dt);
    Model model{grid, data, K, P, threads, {}};
    for (std::size_t n = 0; n < steps; ++n) {
        for (double b : bw) model.weights.push_back(std::sqrt(tw[n] * b));
    }

    const auto np = static_cast<Eigen::Index>(2 * P - 1);
    auto clamp = [&](Eigen::VectorXd p) {
        for (Eigen::Index i = 0; i < np; ++i) p(i) = std::clamp(p(i), options.lower, options.upper);
        return p;
    };
    double data_norm_sq = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double d = trace_l2_norm(data.responses[k].re.values, data.dt, bw);
        data_norm_sq += d * d;
    }
    const double data_scale = std::sqrt(data_norm_sq);
    double perimeter = 0.0;
    for (double b : bw) perimeter += b;
    const double noise = config.noise_level * std::sqrt(static_cast<double>(K) * data.tau * perimeter);
    const double tolerance =
        data_scale > 0.0 ? options.misfit_tolerance * data_scale + noise : 1e-12 + noise;

    Eigen::VectorXd p = clamp(Eigen::VectorXd::Constant(np, options.initial));
    ProbeResponseSet pred = model.forward(p);
    Eigen::VectorXd r = model.residual(pred);
    double f = r.squaredNorm();
    std::vector<std::pair<Eigen::VectorXd, double>> history{{p, std::sqrt(f)}};
    double mu = 1e-3;
    bool converged = data_scale == 0.0 && f == 0.0;
    std::string stop = converged ? "zero misfit" : "";

    auto report_stagnation = [&]() {
        std::ostringstream msg;
        msg.precision(17);
        msg << "Gauss-Newton stagnated with misfit " << std::sqrt(f) << " above tolerance "
            << tolerance << "; iterate history:";
        for (const auto& [it, m] : history) {
            msg << "\n  misfit " << m << " at [";
            for (Eigen::Index i = 0; i < it.size(); ++i) msg << (i ? ", " : "") << it(i);
            msg << "]";
        }
        throw NumericalError(msg.str());
    };

    std::size_t iterations = 0;
    while (!converged && iterations < options.max_iterations) {
        ++iterations;
        Eigen::MatrixXd jac(r.size(), np);
        for (Eigen::Index j = 0; j < np; ++j) {
            Eigen::VectorXd q = p;
            double eta = 1e-6 * std::max(1.0, std::abs(p(j)));
            if (q(j) + eta > options.upper) eta = -eta;
            q(j) += eta;
            jac.col(j) = (model.residual(model.forward(q)) - r) / eta;
        }
        const Eigen::VectorXd grad = jac.transpose() * r;
        const Eigen::MatrixXd hess = jac.transpose() * jac;
        std::vector<bool> active(static_cast<std::size_t>(np), false);
        for (Eigen::Index j = 0; j < np; ++j) {
            active[static_cast<std::size_t>(j)] = (p(j) <= options.lower && grad(j) > 0.0) ||
                                                 (p(j) >= options.upper && grad(j) < 0.0);
        }
        bool accepted = false;
        while (mu <= 1e12) {
            Eigen::MatrixXd sys = hess;
            Eigen::VectorXd rhs = -grad;
            for (Eigen::Index j = 0; j < np; ++j) {
                sys(j, j) += mu * std::max(hess(j, j), 1e-12 * hess.diagonal().maxCoeff());
                if (active[static_cast<std::size_t>(j)]) {
                    sys.row(j).setZero();
                    sys.col(j).setZero();
                    sys(j, j) = 1.0;
                    rhs(j) = 0.0;
                }
            }
            const Eigen::VectorXd step = sys.ldlt().solve(rhs);
            const Eigen::VectorXd trial = clamp(p + step);
            const auto trial_pred = model.forward(trial);
            const Eigen::VectorXd trial_r = model.residual(trial_pred);
            const double trial_f = trial_r.squaredNorm();
            if (trial_f < f) {
                const double rel_step = (trial - p).norm() / std::max(p.norm(), 1e-12);
                const double decrease = (f - trial_f) / f;
                p = trial;
                pred = trial_pred;
                r = trial_r;
                f = trial_f;
                history.emplace_back(p, std::sqrt(f));
                mu = std::max(mu / 10.0, 1e-12);
                accepted = true;
                if (rel_step < options.step_tolerance || decrease < 1e-12 ||
                    std::sqrt(f) <= 1e-14 * data_scale) {
                    if (std::sqrt(f) > tolerance) report_stagnation();
                    converged = true;
                    stop = "relative step " + std::to_string(rel_step);
                }
                break;
            }
            mu *= 10.0;
        }
        if (!accepted) {
            if (std::sqrt(f) > tolerance) report_stagnation();
            converged = true;
            stop = "no further decrease";
        }
    }

    RecoveryResult out;
    if (!converged) out.flags.push_back("iteration limit reached before convergence");
    const EdgeDamping est = to_damping(p, P);
    const Grid edge = Grid::interval(grid.nx());
    out.fields.emplace_back("a1", est.a1.resample(edge));
    out.fields.emplace_back("a2", est.a2.resample(edge));
    for (Eigen::Index i = 0; i < np; ++i) {
        out.modes.push_back({static_cast<std::size_t>(i + 1), p(i), 0.0});
    }
    for (std::size_t k = 0; k < K; ++k) {
        const Eigen::MatrixXd d = pred.responses[k].re.values - data.responses[k].re.values;
        out.modes[std::min(k, out.modes.size() - 1)].residual = trace_l2_norm(d, data.dt, bw);
    }

    const Field a_grid = est.on_grid(grid);
    const auto nodes = grid.boundary_nodes(BoundaryLabel::Gamma1);
    std::vector<double> dual;
    double dist = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double lam = probe_eigenvalue(data.probes[k].id);
        Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
        for (std::size_t b = 0; b < nodes.size(); ++b) {
            load(static_cast<Eigen::Index>(nodes[b])) =
                -std::sqrt(lam) * bw[b] * a_grid[nodes[b]] * data.probes[k].u0[nodes[b]];
        }
        dual.push_back(dual_v_norm_of_load(grid, load));
        dist = std::max(dist, data_norm(MapKind::Square, pred.responses[k].re, grid) /
                                  probe_norm(MapKind::Square, data.probes[k]));
    }
    out.series["dual_norm"] = dual;
    std::vector<double> hist;
    for (const auto& h : history) hist.push_back(h.second);
    out.series["misfit_history"] = hist;

    const double exponent = damping_holder_exponent(options.delta);
    if (options.lower > 0.0) {
        out.bound = options.holder_constant * std::pow(dist / options.lower, exponent);
    } else {
        out.bound = std::numeric_limits<double>::infinity();
        out.flags.push_back("Holder bound unavailable: admissible lower bound is zero");
    }
    out.bound_note = "c (||Lambda(a) - Lambda(0)|| / a_min)^(delta / (2 (2 + delta))); c is not computable";
    out.diagnostics["distance"] = dist;
    out.diagnostics["holder_exponent"] = exponent;
    out.diagnostics["misfit"] = std::sqrt(f);
    out.diagnostics["relative_misfit"] = data_scale > 0.0 ? std::sqrt(f) / data_scale : 0.0;
    out.diagnostics["iterations"] = static_cast<double>(iterations);
    out.diagnostics["dual_norm_max"] = dual.empty() ? 0.0 : *std::max_element(dual.begin(), dual.end());
    out.diagnostics["lower"] = options.lower;
    out.diagnostics["upper"] = options.upper;
    if (!stop.empty()) out.flags.push_back("stopped: " + stop);
    return out;
}

}  // namespace obslab
