#include "obslab/domain/operators.hpp"

#include "obslab/errors.hpp"

namespace obslab {

Eigen::VectorXd DofMap::gather(const Field& f) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) v(k) = f.values[nodes[k]];
    return v;
}

Field DofMap::scatter(const Grid& grid, const Eigen::VectorXd& v) const {
    Field f = Field::zeros(grid);
    for (std::size_t k = 0; k < nodes.size(); ++k) f.values[nodes[k]] = v(k);
    return f;
}

DofMap make_dofs(const Grid& grid, BoundaryCondition bc) {
    DofMap map;
    map.dof_of_node.assign(grid.size(), -1);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        bool free = !grid.on_boundary(n);
        if (bc == BoundaryCondition::Mixed && grid.dimension() == 2) {
            free = grid.label_edges_at(n, BoundaryLabel::Gamma0).empty();
        }
        if (free) {
            map.dof_of_node[n] = static_cast<long>(map.nodes.size());
            map.nodes.push_back(n);
        }
    }
    return map;
}

SparseMatrix energy_form(const Grid& grid) {
    std::vector<Eigen::Triplet<double>> trip;
    auto add_edge = [&](std::size_t a, std::size_t b, double c) {
        trip.emplace_back(a, a, c);
        trip.emplace_back(b, b, c);
        trip.emplace_back(a, b, -c);
        trip.emplace_back(b, a, -c);
    };
    const auto nx = grid.nx();
    const auto ny = grid.ny();
    if (grid.dimension() == 1) {
        const double c = 1.0 / grid.hx();
        for (std::size_t i = 0; i + 1 < nx; ++i) add_edge(i, i + 1, c);
    } else {
        const double hx = grid.hx();
        const double hy = grid.hy();
        for (std::size_t j = 0; j < ny; ++j) {
            const double across = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                add_edge(grid.index(i, j), grid.index(i + 1, j), across * hy / hx);
            }
        }
        for (std::size_t i = 0; i < nx; ++i) {
            const double across = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
            for (std::size_t j = 0; j + 1 < ny; ++j) {
                add_edge(grid.index(i, j), grid.index(i, j + 1), across * hx / hy);
            }
        }
    }
    SparseMatrix k(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(grid.size()));
    k.setFromTriplets(trip.begin(), trip.end());
    return k;
}

SparseMatrix restrict_form(const SparseMatrix& full, const DofMap& dofs) {
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index col = 0; col < full.outerSize(); ++col) {
        const long dc = dofs.dof_of_node[static_cast<std::size_t>(col)];
        if (dc < 0) continue;
        for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
            const long dr = dofs.dof_of_node[static_cast<std::size_t>(it.row())];
            if (dr >= 0) trip.emplace_back(dr, dc, it.value());
        }
    }
    const auto n = static_cast<Eigen::Index>(dofs.size());
    SparseMatrix out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Eigen::VectorXd mass_diagonal(const Grid& grid, const DofMap& dofs) {
    const auto w = grid.quadrature_weights();
    Eigen::VectorXd m(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t k = 0; k < dofs.size(); ++k) m(k) = w[dofs.nodes[k]];
    return m;
}

SparseMatrix shifted_laplacian(const Grid& grid, const DofMap& dofs, const Field& q) {
    require(q.grid == grid, "potential lives on a different grid");
    SparseMatrix k = restrict_form(energy_form(grid), dofs);
    const Eigen::VectorXd m = mass_diagonal(grid, dofs);
    SparseMatrix a = m.cwiseInverse().asDiagonal() * k;
    for (std::size_t d = 0; d < dofs.size(); ++d) {
        a.coeffRef(d, d) += q.values[dofs.nodes[d]];
    }
    a.makeCompressed();
    return a;
}

Field laplacian_all_nodes(const Field& f) {
    const Grid& g = f.grid;
    require(g.nx() >= 4 && (g.dimension() == 1 || g.ny() >= 4),
            "H2 stencil underdetermined: need at least 4 nodes per axis");
    Field out = Field::zeros(g);
    auto second = [&](auto value, std::size_t k, std::size_t n, double h) {
        const double h2 = h * h;
        if (k == 0) return (2.0 * value(0) - 5.0 * value(1) + 4.0 * value(2) - value(3)) / h2;
        if (k == n - 1) {
            return (2.0 * value(n - 1) - 5.0 * value(n - 2) + 4.0 * value(n - 3) - value(n - 4)) /
                   h2;
        }
        return (value(k + 1) - 2.0 * value(k) + value(k - 1)) / h2;
    };
    for (std::size_t node = 0; node < g.size(); ++node) {
        const auto i = g.i_of(node);
        const auto j = g.j_of(node);
        auto along_x = [&](std::size_t ii) { return f.values[g.index(ii, j)]; };
        double lap = second(along_x, i, g.nx(), g.hx());
        if (g.dimension() == 2) {
            auto along_y = [&](std::size_t jj) { return f.values[g.index(i, jj)]; };
            lap += second(along_y, j, g.ny(), g.hy());
        }
        out.values[node] = lap;
    }
    return out;
}

}  // namespace obslab
