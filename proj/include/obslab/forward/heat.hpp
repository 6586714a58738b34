#pragma once

#include "obslab/forward/solution.hpp"

namespace obslab {

/// u_t - Delta u + q u = g(t) f with u = 0 on the boundary, Crank-Nicolson.
/// Either u0, the source, or both may be supplied.
SpaceTimeSolution solve_heat(const Grid& grid, const Field& q, const std::optional<Field>& u0,
                             const std::optional<Source>& source, double tau, double dt,
                             const SolveOptions& options = {});

}  // namespace obslab
