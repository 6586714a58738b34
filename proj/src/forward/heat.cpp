#include "obslab/forward/heat.hpp"

#include <Eigen/SparseLU>

#include "obslab/domain/operators.hpp"
#include "obslab/errors.hpp"

namespace obslab {

SpaceTimeSolution solve_heat(const Grid& grid, const Field& q, const std::optional<Field>& u0,
                             const std::optional<Source>& source, double tau, double dt,
                             const SolveOptions& options) {
    require(q.grid == grid, "potential lives on a different grid");
    require(u0 || source, "heat problem needs initial data or a source");
    require(tau > 0.0 && dt > 0.0, "tau and dt must be positive");
    if (u0) require(u0->grid == grid, "initial data live on a different grid");
    if (source) require(source->f.grid == grid, "source lives on a different grid");

    const DofMap dofs = make_dofs(grid, BoundaryCondition::Dirichlet);
    const SparseMatrix op = shifted_laplacian(grid, dofs, q);
    SparseMatrix id(op.rows(), op.cols());
    id.setIdentity();
    const SparseMatrix lhs = id + 0.5 * dt * op;
    const SparseMatrix rhs = id - 0.5 * dt * op;
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(lhs);
    if (lu.info() != Eigen::Success) throw NumericalError("Crank-Nicolson factorization failed");

    const Eigen::VectorXd f =
        source ? dofs.gather(source->f) : Eigen::VectorXd::Zero(op.rows());
    auto g = [&](std::size_t n) {
        return source ? source->g.real_at(static_cast<double>(n) * dt) : 0.0;
    };
    const std::size_t steps = step_count(tau, dt);

    SpaceTimeSolution sol;
    sol.grid = grid;
    sol.dt = dt;
    Eigen::VectorXd u = u0 ? dofs.gather(*u0) : Eigen::VectorXd::Zero(op.rows());
    for (std::size_t n = 0; n < steps; ++n) {
        Field uf = dofs.scatter(grid, u);
        if (options.observer) options.observer(n, uf, nullptr);
        if (options.keep_history) sol.u.push_back(std::move(uf));
        if (n + 1 == steps) break;
        const Eigen::VectorXd b = rhs * u + (0.5 * dt * (g(n) + g(n + 1))) * f;
        u = lu.solve(b);
        if (lu.info() != Eigen::Success || !u.allFinite()) {
            throw NumericalError("Crank-Nicolson solve failed at time index " +
                                 std::to_string(n + 1));
        }
    }
    return sol;
}

}  // namespace obslab
