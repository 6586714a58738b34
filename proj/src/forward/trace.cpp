#include "obslab/forward/trace.hpp"

#include "obslab/errors.hpp"

namespace obslab {

TraceStencil::TraceStencil(const Grid& grid, BoundaryLabel label)
    : grid_(grid), label_(label) {
    require(grid.has_label(label), "boundary label '" + std::string(to_string(label)) +
                                       "' is absent from the grid");
    nodes_ = grid.boundary_nodes(label);
    for (auto node : nodes_) {
        edges_.push_back(grid.label_edges_at(node, label));
        damped_.push_back(grid.dimension() == 2 &&
                          !grid.label_edges_at(node, BoundaryLabel::Gamma1).empty());
    }
}

namespace {

double outward_derivative(const Grid& g, const Field& u, std::size_t node, Edge e) {
    const auto i = g.i_of(node);
    const auto j = g.j_of(node);
    auto at = [&](std::size_t ii, std::size_t jj) { return u.values[g.index(ii, jj)]; };
    switch (e) {
        case Edge::Left:
            return (3.0 * at(0, j) - 4.0 * at(1, j) + at(2, j)) / (2.0 * g.hx());
        case Edge::Right: {
            const auto n = g.nx() - 1;
            return (3.0 * at(n, j) - 4.0 * at(n - 1, j) + at(n - 2, j)) / (2.0 * g.hx());
        }
        case Edge::Bottom:
            return (3.0 * at(i, 0) - 4.0 * at(i, 1) + at(i, 2)) / (2.0 * g.hy());
        case Edge::Top: {
            const auto n = g.ny() - 1;
            return (3.0 * at(i, n) - 4.0 * at(i, n - 1) + at(i, n - 2)) / (2.0 * g.hy());
        }
    }
    return 0.0;
}

}  // namespace

Eigen::RowVectorXd TraceStencil::apply(const Field& u) const {
    require(u.grid == grid_, "trace of a field on a different grid");
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        double s = 0.0;
        for (Edge e : edges_[k]) s += outward_derivative(grid_, u, nodes_[k], e);
        row(k) = s / static_cast<double>(edges_[k].size());
    }
    return row;
}

Eigen::RowVectorXd TraceStencil::apply(const Field& u, const Field& damping,
                                       const Field& ut) const {
    Eigen::RowVectorXd row = apply(u);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (damped_[k]) row(k) = -damping.values[nodes_[k]] * ut.values[nodes_[k]];
    }
    return row;
}

BoundaryTrace neumann_trace(const SpaceTimeSolution& solution, BoundaryLabel label) {
    const TraceStencil stencil(solution.grid, label);
    BoundaryTrace trace;
    trace.label = label;
    trace.dt = solution.dt;
    trace.nodes = stencil.nodes();
    trace.values.resize(static_cast<Eigen::Index>(solution.steps()),
                        static_cast<Eigen::Index>(trace.nodes.size()));
    const auto& damping = solution.boundary_damping;
    for (std::size_t n = 0; n < solution.steps(); ++n) {
        trace.values.row(static_cast<Eigen::Index>(n)) =
            damping ? stencil.apply(solution.u[n], *damping, solution.ut[n])
                    : stencil.apply(solution.u[n]);
    }
    return trace;
}

TraceRecorder::TraceRecorder(const Grid& grid, BoundaryLabel label, double dt, std::size_t steps,
                             std::optional<Field> damping)
    : stencil_(grid, label), damping_(std::move(damping)) {
    trace_.label = label;
    trace_.dt = dt;
    trace_.nodes = stencil_.nodes();
    trace_.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps),
                                          static_cast<Eigen::Index>(trace_.nodes.size()));
}

StepObserver TraceRecorder::observer() {
    return [this](std::size_t n, const Field& u, const Field* ut) {
        trace_.values.row(static_cast<Eigen::Index>(n)) =
            (damping_ && ut != nullptr) ? stencil_.apply(u, *damping_, *ut) : stencil_.apply(u);
    };
}

}  // namespace obslab
