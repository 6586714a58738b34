#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "obslab/domain/field.hpp"
#include "obslab/domain/series.hpp"

namespace obslab {

/// Snapshots u(., n dt) for n = 0 .. steps-1, plus du/dt for wave problems.
struct SpaceTimeSolution {
    Grid grid = Grid::interval(3);
    double dt = 0.0;
    std::vector<Field> u;
    std::vector<Field> ut;
    /// Wave problems: staggered discrete energy between levels n and n+1.
    std::vector<double> energy;
    /// Boundary-damped square: coefficient a at Gamma1 nodes, zero elsewhere.
    /// Where set, the Neumann trace is read from the boundary condition.
    std::optional<Field> boundary_damping;

    std::size_t steps() const { return u.size(); }
};

/// Separable source g(t) f(x).
struct Source {
    Kernel g;
    Field f;
};

/// Called once per time level with u and (wave problems) du/dt.
using StepObserver = std::function<void(std::size_t n, const Field& u, const Field* ut)>;

struct SolveOptions {
    bool keep_history = true;
    StepObserver observer;
};

}  // namespace obslab
