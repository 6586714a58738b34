#pragma once

#include <Eigen/Dense>

#include "obslab/forward/solution.hpp"

namespace obslab {

/// Boundary damping on Gamma1: a1 along the bottom edge (function of x) and
/// a2 along the left edge (function of y), both sampled on interval grids.
struct EdgeDamping {
    Field a1;
    Field a2;

    static EdgeDamping constant(std::size_t nodes, double value);
    /// Per-node coefficient on `grid`: a1 on the bottom edge, a2 on the left
    /// edge, zero elsewhere. The shared corner takes a1(0).
    Field on_grid(const Grid& grid) const;
};

/// Time profile lambda(t) times a functional w on V given by its load vector
/// (w applied to each nodal hat function, all nodes of the square).
struct BoundarySource {
    Kernel lambda;
    Eigen::VectorXd load;
};

/// u_tt - Delta u = lambda(t) w on the unit square, u = 0 on Gamma0,
/// d_nu u + a u_t = 0 on Gamma1. Leapfrog with ghost-node closure on Gamma1.
SpaceTimeSolution solve_wave_boundary_damped(const Grid& grid, const EdgeDamping& damping,
                                             const Field& u0, const Field& u1,
                                             const std::optional<BoundarySource>& source,
                                             double tau, double dt,
                                             const SolveOptions& options = {});

}  // namespace obslab
