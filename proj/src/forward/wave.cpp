#include "obslab/forward/wave.hpp"

#include <cmath>
#include <string>

#include "obslab/domain/norms.hpp"
#include "obslab/domain/operators.hpp"
#include "obslab/errors.hpp"

namespace obslab {

namespace {

void require_dirichlet(const Field& f, const char* what) {
    const double tol = 1e-10 * std::max(1.0, f.max_abs());
    for (std::size_t n = 0; n < f.size(); ++n) {
        if (f.grid.on_boundary(n) && std::abs(f.values[n]) > tol) {
            throw InputError(std::string(what) + " is not zero on the Dirichlet boundary");
        }
    }
}

}  // namespace

SpaceTimeSolution solve_wave(const Grid& grid, const Field& q, const Field& a, const Field& u0,
                             const Field& u1, const std::optional<Source>& source, double tau,
                             double dt, const SolveOptions& options) {
    require(q.grid == grid && a.grid == grid && u0.grid == grid && u1.grid == grid,
            "wave data live on different grids");
    require(tau > 0.0 && dt > 0.0, "tau and dt must be positive");
    const double hmin = grid.dimension() == 1 ? grid.hx() : std::min(grid.hx(), grid.hy());
    const double cfl = grid.dimension() == 1 ? hmin : hmin / std::sqrt(2.0);
    require(dt <= cfl * (1.0 + 1e-12), "CFL violation: dt = " + std::to_string(dt) +
                                           " exceeds " + std::to_string(cfl));
    require_dirichlet(u0, "u0");
    require_dirichlet(u1, "u1");
    if (source) require(source->f.grid == grid, "source lives on a different grid");

    const DofMap dofs = make_dofs(grid, BoundaryCondition::Dirichlet);
    const SparseMatrix op = shifted_laplacian(grid, dofs, q);
    const Eigen::VectorXd w = mass_diagonal(grid, dofs);
    const Eigen::ArrayXd damp = dofs.gather(a).array();
    const Eigen::VectorXd f = source ? dofs.gather(source->f) : Eigen::VectorXd::Zero(w.size());
    auto g = [&](std::size_t n) {
        return source ? source->g.real_at(static_cast<double>(n) * dt) : 0.0;
    };
    const std::size_t steps = step_count(tau, dt);

    SpaceTimeSolution sol;
    sol.grid = grid;
    sol.dt = dt;
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
        return v.dot(w.cwiseProduct(v)) + hi.dot(w.cwiseProduct(op * lo));
    };

    Eigen::VectorXd prev = dofs.gather(u0);
    const Eigen::VectorXd v0 = dofs.gather(u1);
    Eigen::VectorXd cur =
        prev + dt * v0 +
        0.5 * dt * dt * (-(op * prev) - (damp * v0.array()).matrix() + g(0) * f);
    emit(0, prev, v0);
    sol.energy.push_back(staggered_energy(prev, cur));

    const Eigen::ArrayXd plus = 1.0 + 0.5 * dt * damp;
    const Eigen::ArrayXd minus = 1.0 - 0.5 * dt * damp;
    for (std::size_t n = 1; n < steps; ++n) {
        Eigen::VectorXd next =
            ((2.0 * cur.array() - minus * prev.array() +
              dt * dt * (-(op * cur) + g(n) * f).array()) /
             plus)
                .matrix();
        if (!next.allFinite()) {
            throw NumericalError("wave solution became non-finite at time index " +
                                 std::to_string(n + 1));
        }
        emit(n, cur, (next - prev) / (2.0 * dt));
        sol.energy.push_back(staggered_energy(cur, next));
        prev = std::move(cur);
        cur = std::move(next);
    }
    return sol;
}

std::vector<double> wave_energy(const SpaceTimeSolution& solution, const Field& q) {
    require(solution.ut.size() == solution.u.size(), "energy needs stored velocities");
    std::vector<double> e;
    e.reserve(solution.steps());
    for (std::size_t n = 0; n < solution.steps(); ++n) {
        const Field& u = solution.u[n];
        const double grad = norm(u, NormKind::H10);
        e.push_back(inner(solution.ut[n], solution.ut[n]) + grad * grad + inner(hadamard(q, u), u));
    }
    return e;
}

}  // namespace obslab
