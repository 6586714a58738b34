#include "obslab/forward/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "obslab/domain/norms.hpp"
#include "obslab/domain/operators.hpp"
#include "obslab/errors.hpp"
#include "obslab/forward/heat.hpp"
#include "obslab/forward/trace.hpp"
#include "obslab/forward/wave.hpp"
#include "obslab/parallel.hpp"

namespace obslab {

MapKind parse_map_kind(std::string_view text) {
    if (text == "wave") return MapKind::Wave;
    if (text == "heat") return MapKind::Heat;
    if (text == "square") return MapKind::Square;
    throw InputError("unknown map kind '" + std::string(text) + "'");
}

MapCoefficients MapCoefficients::zero(const Grid& grid) {
    MapCoefficients c{Field::zeros(grid), Field::zeros(grid), std::nullopt};
    if (grid.dimension() == 2) c.edge = EdgeDamping::constant(grid.nx(), 0.0);
    return c;
}

std::vector<Probe> eigen_probes(const EigenBasis& basis, std::size_t count) {
    require(count <= basis.size(), "more probes requested than eigenpairs available");
    std::vector<Probe> probes;
    for (std::size_t k = 0; k < count; ++k) {
        const Field& phi = basis.functions[k];
        probes.push_back({"phi" + std::to_string(k + 1), phi, Field::zeros(phi.grid),
                          std::nullopt, std::nullopt});
    }
    return probes;
}

std::vector<Probe> complex_eigen_probes(const EigenBasis& basis, std::size_t count) {
    require(count <= basis.size(), "more probes requested than eigenpairs available");
    std::vector<Probe> probes;
    for (std::size_t k = 0; k < count; ++k) {
        const Field& phi = basis.functions[k];
        const Field zero = Field::zeros(phi.grid);
        probes.push_back({"cphi" + std::to_string(k + 1), phi, zero, zero,
                          std::sqrt(basis.values[k]) * phi});
    }
    return probes;
}

std::vector<Probe> square_probes(const Grid& grid, std::size_t count) {
    require(grid.dimension() == 2, "square probes need a 2D grid");
    std::vector<std::pair<int, int>> modes;
    const int span = static_cast<int>(count) + 1;
    for (int k = 0; k < span; ++k) {
        for (int l = 0; l < span; ++l) modes.emplace_back(k, l);
    }
    std::stable_sort(modes.begin(), modes.end(), [](auto m1, auto m2) {
        const double l1 = mixed_square_eigenvalue(m1.first, m1.second);
        const double l2 = mixed_square_eigenvalue(m2.first, m2.second);
        if (std::abs(l1 - l2) > 1e-9) return l1 < l2;
        return m1.first < m2.first;
    });
    std::vector<Probe> probes;
    for (std::size_t c = 0; c < count; ++c) {
        const auto [k, l] = modes[c];
        probes.push_back({"phi" + std::to_string(k) + "_" + std::to_string(l),
                          mixed_square_eigenpairs(grid, k, l).function, Field::zeros(grid),
                          std::nullopt, std::nullopt});
    }
    return probes;
}

namespace {

BoundaryTrace run_one(MapKind kind, const Grid& grid, const MapCoefficients& c, const Field& u0,
                      const Field& u1, double tau, double dt, BoundaryLabel label,
                      Field* final_state) {
    const std::size_t steps = step_count(tau, dt);
    std::optional<Field> damping;
    if (kind == MapKind::Square) {
        require(c.edge.has_value(), "square map needs edge damping profiles");
        damping = c.edge->on_grid(grid);
    }
    TraceRecorder recorder(grid, label, dt, steps, damping);
    SolveOptions options;
    options.keep_history = false;
    auto record = recorder.observer();
    options.observer = [&](std::size_t n, const Field& u, const Field* ut) {
        record(n, u, ut);
        if (final_state != nullptr && n + 1 == steps) *final_state = u;
    };
    switch (kind) {
        case MapKind::Wave:
            solve_wave(grid, c.q, c.a, u0, u1, std::nullopt, tau, dt, options);
            break;
        case MapKind::Heat:
            solve_heat(grid, c.q, u0, std::nullopt, tau, dt, options);
            break;
        case MapKind::Square:
            solve_wave_boundary_damped(grid, *c.edge, u0, u1, std::nullopt, tau, dt, options);
            break;
    }
    return recorder.take();
}

template <class Error>
[[noreturn]] void rethrow_annotated(const Error& e, const std::string& id) {
    throw Error("probe " + id + ": " + e.what());
}

}  // namespace

ProbeResponseSet initial_to_boundary(MapKind kind, const Grid& grid, const MapCoefficients& coeffs,
                                     const std::vector<Probe>& probes, double tau, double dt,
                                     BoundaryLabel label, unsigned threads) {
    require(!probes.empty(), "probe dictionary is empty");
    ProbeResponseSet set;
    set.kind = kind;
    set.label = label;
    set.tau = tau;
    set.dt = dt;
    set.probes = probes;
    set.responses.resize(probes.size());
    parallel_for(probes.size(), threads, [&](std::size_t k) {
        const Probe& p = probes[k];
        try {
            ProbeResponse r;
            r.id = p.id;
            r.re = run_one(kind, grid, coeffs, p.u0, p.u1, tau, dt, label, nullptr);
            if (p.is_complex()) {
                const Field zero = Field::zeros(grid);
                r.im = run_one(kind, grid, coeffs, p.u0_im.value_or(zero), p.u1_im.value_or(zero),
                               tau, dt, label, nullptr);
            }
            set.responses[k] = std::move(r);
        } catch (const InputError& e) {
            rethrow_annotated(e, p.id);
        } catch (const NumericalError& e) {
            rethrow_annotated(e, p.id);
        }
    });
    return set;
}

BoundaryTrace restrict_trace(const BoundaryTrace& fine, const Grid& fine_grid,
                             const Grid& coarse_grid, double coarse_dt) {
    const auto f = coarse_grid.refinement_factor_from(fine_grid);
    require(f >= 1, "coarse grid is not nested in the forward grid");
    const double ratio = coarse_dt / fine.dt;
    const auto r = static_cast<std::size_t>(std::llround(ratio));
    require(r >= 1 && std::abs(ratio - static_cast<double>(r)) < 1e-9 * ratio,
            "coarse time step is not a multiple of the forward time step");

    BoundaryTrace out;
    out.label = fine.label;
    out.dt = coarse_dt;
    out.nodes = coarse_grid.boundary_nodes(fine.label);
    std::vector<Eigen::Index> cols;
    for (auto node : out.nodes) {
        const auto fine_node = fine_grid.index(coarse_grid.i_of(node) * f, coarse_grid.j_of(node) * f);
        const auto it = std::find(fine.nodes.begin(), fine.nodes.end(), fine_node);
        require(it != fine.nodes.end(), "coarse boundary node missing from the fine trace");
        cols.push_back(static_cast<Eigen::Index>(it - fine.nodes.begin()));
    }
    const std::size_t rows = (fine.steps() - 1) / r + 1;
    out.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t n = 0; n < rows; ++n) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out.values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c)) =
                fine.values(static_cast<Eigen::Index>(n * r), cols[c]);
        }
    }
    return out;
}

ProbeResponseSet restrict_responses(const ProbeResponseSet& fine, const Grid& fine_grid,
                                    const Grid& coarse_grid, double coarse_dt) {
    ProbeResponseSet out = fine;
    out.dt = coarse_dt;
    for (auto& p : out.probes) {
        p.u0 = p.u0.restrict_to(coarse_grid);
        p.u1 = p.u1.restrict_to(coarse_grid);
        if (p.u0_im) p.u0_im = p.u0_im->restrict_to(coarse_grid);
        if (p.u1_im) p.u1_im = p.u1_im->restrict_to(coarse_grid);
    }
    for (auto& r : out.responses) {
        r.re = restrict_trace(r.re, fine_grid, coarse_grid, coarse_dt);
        if (r.im) r.im = restrict_trace(*r.im, fine_grid, coarse_grid, coarse_dt);
    }
    return out;
}

double probe_norm(MapKind kind, const Probe& probe) {
    auto part = [&](const Field& u0, const Field& u1) {
        switch (kind) {
            case MapKind::Wave: {
                const double a = norm(u0, NormKind::H2);
                const double b = norm(u1, NormKind::H10);
                return a * a + b * b;
            }
            case MapKind::Heat: {
                const double a = norm(u0, NormKind::H10) +
                                 norm(laplacian_all_nodes(u0).with_zero_boundary(), NormKind::H10);
                return a * a;
            }
            case MapKind::Square: {
                const double a = norm(u0, NormKind::V);
                const double b = norm(laplacian_all_nodes(u0), NormKind::L2);
                return a * a + b * b;
            }
        }
        return 0.0;
    };
    double s = part(probe.u0, probe.u1);
    if (probe.is_complex()) {
        const Field zero = Field::zeros(probe.u0.grid);
        s += part(probe.u0_im.value_or(zero), probe.u1_im.value_or(zero));
    }
    return std::sqrt(s);
}

double data_norm(MapKind kind, const BoundaryTrace& trace, const Grid& grid) {
    const auto bw = grid.boundary_weights(trace.label);
    return kind == MapKind::Square ? trace_l2_norm(trace.values, trace.dt, bw)
                                   : trace_h1_norm(trace.values, trace.dt, bw);
}

double operator_distance(const ProbeResponseSet& a, const ProbeResponseSet& b, const Grid& grid) {
    require(a.kind == b.kind && a.size() == b.size(), "response sets are not comparable");
    double sup = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        require(a.responses[k].id == b.responses[k].id, "response sets use different probes");
        const double pn = probe_norm(a.kind, a.probes[k]);
        require(pn > 0.0, "degenerate probe " + a.probes[k].id);
        double d = data_norm(a.kind, a.responses[k].re - b.responses[k].re, grid);
        if (a.responses[k].im && b.responses[k].im) {
            const double di = data_norm(a.kind, *a.responses[k].im - *b.responses[k].im, grid);
            d = std::hypot(d, di);
        }
        sup = std::max(sup, d / pn);
    }
    return sup;
}

double estimate_observability_constant(MapKind kind, const Grid& grid,
                                       const MapCoefficients& coeffs,
                                       const std::vector<Probe>& probes, BoundaryLabel label,
                                       double tau, double dt, unsigned threads) {
    require(!probes.empty(), "probe dictionary is empty");
    const auto bw = grid.boundary_weights(label);
    std::vector<double> ratios(probes.size());
    parallel_for(probes.size(), threads, [&](std::size_t k) {
        const Probe& p = probes[k];
        require(!p.is_complex(), "observability estimate takes real probes");
        Field final_state = Field::zeros(grid);
        const BoundaryTrace t =
            run_one(kind, grid, coeffs, p.u0, p.u1, tau, dt, label, &final_state);
        const double num = trace_l2_norm(t.values, t.dt, bw);
        double den = 0.0;
        if (kind == MapKind::Heat) {
            den = norm(final_state, NormKind::L2);
        } else {
            const NormKind grad = kind == MapKind::Square ? NormKind::V : NormKind::H10;
            den = std::hypot(norm(p.u0, grad), norm(p.u1, NormKind::L2));
        }
        if (!(den > 0.0)) throw InputError("degenerate probe " + p.id + " has zero norm");
        ratios[k] = num / den;
    });
    return *std::min_element(ratios.begin(), ratios.end());
}

}  // namespace obslab
