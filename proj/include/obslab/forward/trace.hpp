#pragma once

#include <optional>

#include <Eigen/Dense>

#include "obslab/forward/solution.hpp"

namespace obslab {

/// Outward normal derivatives at the nodes of a labelled boundary subset by
/// second-order one-sided 3-point stencils. Corner nodes average over the
/// label's edges that contain them.
class TraceStencil {
public:
    TraceStencil(const Grid& grid, BoundaryLabel label);

    const std::vector<std::size_t>& nodes() const { return nodes_; }
    BoundaryLabel label() const { return label_; }
    Eigen::RowVectorXd apply(const Field& u) const;
    /// As apply(), but Gamma1 nodes read -a u_t from the damping condition.
    Eigen::RowVectorXd apply(const Field& u, const Field& damping, const Field& ut) const;

private:
    Grid grid_;
    BoundaryLabel label_;
    std::vector<std::size_t> nodes_;
    std::vector<std::vector<Edge>> edges_;
    std::vector<bool> damped_;
};

BoundaryTrace neumann_trace(const SpaceTimeSolution& solution, BoundaryLabel label);

/// Observer that fills a trace as a solver runs, so no history is stored.
class TraceRecorder {
public:
    TraceRecorder(const Grid& grid, BoundaryLabel label, double dt, std::size_t steps,
                  std::optional<Field> damping = std::nullopt);
    StepObserver observer();
    BoundaryTrace take() { return std::move(trace_); }

private:
    TraceStencil stencil_;
    std::optional<Field> damping_;
    BoundaryTrace trace_;
};

}  // namespace obslab
