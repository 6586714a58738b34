#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "obslab/domain/field.hpp"

namespace obslab {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Which nodes carry unknowns.
enum class BoundaryCondition {
    Dirichlet,  ///< u = 0 on the whole boundary
    Mixed,      ///< u = 0 on Gamma0, natural (Neumann) on Gamma1; 1D falls back to Dirichlet
};

/// Correspondence between grid nodes and unknowns of a discrete operator.
struct DofMap {
    std::vector<std::size_t> nodes;    ///< node of each unknown
    std::vector<long> dof_of_node;     ///< -1 for constrained nodes

    std::size_t size() const { return nodes.size(); }
    Eigen::VectorXd gather(const Field& f) const;
    Field scatter(const Grid& grid, const Eigen::VectorXd& v) const;
};

DofMap make_dofs(const Grid& grid, BoundaryCondition bc);

/// Dirichlet energy form a(u,v) = int grad u . grad v on all nodes: edges are
/// integrated by the midpoint rule along the edge and the trapezoid rule across
/// it, so edges lying on the boundary carry weight 1/2. Restricted to a DofMap
/// it equals W * (-Delta_h) with ghost-node Neumann closure on free boundaries.
SparseMatrix energy_form(const Grid& grid);
SparseMatrix restrict_form(const SparseMatrix& full, const DofMap& dofs);

/// Trapezoid weights restricted to the unknowns.
Eigen::VectorXd mass_diagonal(const Grid& grid, const DofMap& dofs);

/// -Delta_h + q on the unknowns of `dofs`, i.e. W^{-1}(K + W Q).
SparseMatrix shifted_laplacian(const Grid& grid, const DofMap& dofs, const Field& q);

/// Per-axis second differences with one-sided 4-point closures at the ends,
/// summed into a Laplacian at every node. Needs at least 4 nodes per axis.
Field laplacian_all_nodes(const Field& f);

}  // namespace obslab
