#pragma once

#include "obslab/forward/solution.hpp"

namespace obslab {

/// u_tt - Delta u + q u + a u_t = g(t) f with u = 0 on the boundary.
/// Leapfrog in time, the damping term centred; the first level comes from a
/// second-order Taylor step. Requires dt <= h (1D) or h/sqrt(2) (2D).
SpaceTimeSolution solve_wave(const Grid& grid, const Field& q, const Field& a, const Field& u0,
                             const Field& u1, const std::optional<Source>& source, double tau,
                             double dt, const SolveOptions& options = {});

/// E(t) = ||u_t||^2 + ||grad u||^2 + <q u, u> at every stored level.
std::vector<double> wave_energy(const SpaceTimeSolution& solution, const Field& q);

}  // namespace obslab
