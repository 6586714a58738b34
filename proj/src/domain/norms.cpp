#include "obslab/domain/norms.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "obslab/domain/operators.hpp"
#include "obslab/errors.hpp"

namespace obslab {

NormKind parse_norm_kind(std::string_view text) {
    if (text == "L2") return NormKind::L2;
    if (text == "H10") return NormKind::H10;
    if (text == "H2") return NormKind::H2;
    if (text == "V") return NormKind::V;
    if (text == "dualV") return NormKind::DualV;
    throw InputError("unknown norm kind '" + std::string(text) + "'");
}

std::string_view to_string(NormKind kind) {
    switch (kind) {
        case NormKind::L2: return "L2";
        case NormKind::H10: return "H10";
        case NormKind::H2: return "H2";
        case NormKind::V: return "V";
        case NormKind::DualV: return "dualV";
    }
    return "?";
}

double inner(const Field& a, const Field& b) {
    require(a.grid == b.grid, "inner product of fields on different grids");
    const auto w = a.grid.quadrature_weights();
    double s = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) s += w[n] * a.values[n] * b.values[n];
    return s;
}

namespace {

double energy(const Field& f) {
    const SparseMatrix k = energy_form(f.grid);
    const Eigen::Map<const Eigen::VectorXd> u(f.values.data(), static_cast<Eigen::Index>(f.size()));
    return std::max(0.0, u.dot(k * u));
}

}  // namespace

double dual_v_norm_of_load(const Grid& grid, const Eigen::VectorXd& load) {
    require(load.size() == static_cast<Eigen::Index>(grid.size()), "load vector size mismatch");
    const DofMap dofs = make_dofs(grid, BoundaryCondition::Mixed);
    const SparseMatrix k = restrict_form(energy_form(grid), dofs);
    Eigen::VectorXd b(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t d = 0; d < dofs.size(); ++d) b(d) = load(dofs.nodes[d]);
    Eigen::SimplicialLDLT<SparseMatrix> solver(k);
    if (solver.info() != Eigen::Success) throw NumericalError("Riesz problem factorization failed");
    const Eigen::VectorXd r = solver.solve(b);
    return std::sqrt(std::max(0.0, b.dot(r)));
}

double norm(const Field& f, NormKind kind) {
    switch (kind) {
        case NormKind::L2: return std::sqrt(std::max(0.0, inner(f, f)));
        case NormKind::H10: return std::sqrt(energy(f));
        case NormKind::H2: {
            const Field lap = laplacian_all_nodes(f);
            return std::sqrt(inner(f, f) + energy(f) + inner(lap, lap));
        }
        case NormKind::V: {
            const DofMap dofs = make_dofs(f.grid, BoundaryCondition::Mixed);
            return std::sqrt(energy(dofs.scatter(f.grid, dofs.gather(f))));
        }
        case NormKind::DualV: {
            const auto w = f.grid.quadrature_weights();
            Eigen::VectorXd load(static_cast<Eigen::Index>(f.size()));
            for (std::size_t n = 0; n < f.size(); ++n) load(n) = w[n] * f.values[n];
            return dual_v_norm_of_load(f.grid, load);
        }
    }
    throw InputError("unknown norm kind");
}

}  // namespace obslab
