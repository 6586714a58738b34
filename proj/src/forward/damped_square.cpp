#include "obslab/forward/damped_square.hpp"

#include <cmath>
#include <string>

#include "obslab/domain/operators.hpp"
#include "obslab/errors.hpp"

namespace obslab {

EdgeDamping EdgeDamping::constant(std::size_t nodes, double value) {
    const Grid line = Grid::interval(nodes);
    return {Field::constant(line, value), Field::constant(line, value)};
}

Field EdgeDamping::on_grid(const Grid& grid) const {
    require(grid.dimension() == 2, "edge damping lives on the unit square");
    Field out = Field::zeros(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (!grid.label_edges_at(n, BoundaryLabel::Gamma1).empty()) {
            out.values[n] = grid.on_edge(n, Edge::Bottom) ? a1.interpolate(grid.x(n))
                                                          : a2.interpolate(grid.y(n));
        }
    }
    return out;
}

namespace {

void validate(const EdgeDamping& d) {
    require(d.a1.grid.dimension() == 1 && d.a2.grid.dimension() == 1,
            "edge damping profiles must be sampled on intervals");
    for (double v : d.a1.values) require(v >= 0.0, "negative boundary damping rejected");
    for (double v : d.a2.values) require(v >= 0.0, "negative boundary damping rejected");
    const double s = std::max({1.0, d.a1.max_abs(), d.a2.max_abs()});
    require(std::abs(d.a1.values.front() - d.a2.values.front()) <= 1e-9 * s,
            "edge damping must agree at the shared corner: a1(0) = a2(0)");
}

}  // namespace

SpaceTimeSolution solve_wave_boundary_damped(const Grid& grid, const EdgeDamping& damping,
                                             const Field& u0, const Field& u1,
                                             const std::optional<BoundarySource>& source,
                                             double tau, double dt, const SolveOptions& options) {
    require(grid.dimension() == 2, "boundary-damped wave lives on the unit square");
    require(u0.grid == grid && u1.grid == grid, "initial data live on a different grid");
    require(tau > 0.0 && dt > 0.0, "tau and dt must be positive");
    const double cfl = std::min(grid.hx(), grid.hy()) / std::sqrt(2.0);
    require(dt <= cfl * (1.0 + 1e-12), "CFL violation: dt = " + std::to_string(dt) +
                                           " exceeds " + std::to_string(cfl));
    validate(damping);
    if (source) {
        require(source->load.size() == static_cast<Eigen::Index>(grid.size()),
                "boundary source load has the wrong size");
    }

    const DofMap dofs = make_dofs(grid, BoundaryCondition::Mixed);
    const SparseMatrix k = restrict_form(energy_form(grid), dofs);
    const Eigen::ArrayXd w = mass_diagonal(grid, dofs).array();

    // Boundary damping matrix: edge trapezoid weight times the edge profile.
    Eigen::ArrayXd b = Eigen::ArrayXd::Zero(w.size());
    for (std::size_t d = 0; d < dofs.size(); ++d) {
        const auto node = dofs.nodes[d];
        for (Edge e : grid.label_edges_at(node, BoundaryLabel::Gamma1)) {
            const bool bottom = e == Edge::Bottom;
            const double h = bottom ? grid.hx() : grid.hy();
            const auto along = bottom ? grid.i_of(node) : grid.j_of(node);
            const double weight = along == 0 ? 0.5 * h : h;
            const double coeff = bottom ? damping.a1.interpolate(grid.x(node))
                                        : damping.a2.interpolate(grid.y(node));
            b(d) += weight * coeff;
        }
    }
    Eigen::VectorXd load = Eigen::VectorXd::Zero(w.size());
    if (source) {
        for (std::size_t d = 0; d < dofs.size(); ++d) load(d) = source->load(dofs.nodes[d]);
    }
    auto lam = [&](std::size_t n) {
        return source ? source->lambda.real_at(static_cast<double>(n) * dt) : 0.0;
    };
    const std::size_t steps = step_count(tau, dt);

    SpaceTimeSolution sol;
    sol.grid = grid;
    sol.dt = dt;
    sol.boundary_damping = damping.on_grid(grid);
    auto emit = [&](std::size_t n, const Eigen::VectorXd& u, const Eigen::VectorXd& ut) {
        Field uf = dofs.scatter(grid, u);
        Field utf = dofs.scatter(grid, ut);
        if (options.observer) options.observer(n, uf, &utf);
        if (options.keep_history) {
            sol.u.push_back(std::move(uf));
            sol.ut.push_back(std::move(utf));
        }
    };
    auto staggered_energy = [&](const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        const Eigen::VectorXd v = (hi - lo) / dt;
        return (w * v.array().square()).sum() + hi.dot(k * lo);
    };

    Eigen::VectorXd prev = dofs.gather(u0);
    const Eigen::VectorXd v0 = dofs.gather(u1);
    Eigen::VectorXd cur =
        prev + dt * v0 +
        (0.5 * dt * dt * (-(k * prev).array() - b * v0.array() + lam(0) * load.array()) / w)
            .matrix();
    emit(0, prev, v0);
    sol.energy.push_back(staggered_energy(prev, cur));

    const Eigen::ArrayXd plus = w + 0.5 * dt * b;
    const Eigen::ArrayXd minus = w - 0.5 * dt * b;
    for (std::size_t n = 1; n < steps; ++n) {
        Eigen::VectorXd next =
            ((2.0 * w * cur.array() - minus * prev.array() +
              dt * dt * (-(k * cur).array() + lam(n) * load.array())) /
             plus)
                .matrix();
        if (!next.allFinite()) {
            throw NumericalError("damped wave solution became non-finite at time index " +
                                 std::to_string(n + 1));
        }
        emit(n, cur, (next - prev) / (2.0 * dt));
        sol.energy.push_back(staggered_energy(cur, next));
        prev = std::move(cur);
        cur = std::move(next);
    }
    return sol;
}

}  // namespace obslab
