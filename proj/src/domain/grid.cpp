#include "obslab/domain/grid.hpp"

#include <algorithm>
#include <cmath>

#include "obslab/errors.hpp"

namespace obslab {

std::string_view to_string(BoundaryLabel label) {
    switch (label) {
        case BoundaryLabel::All: return "all";
        case BoundaryLabel::Left: return "left";
        case BoundaryLabel::Right: return "right";
        case BoundaryLabel::Bottom: return "bottom";
        case BoundaryLabel::Top: return "top";
        case BoundaryLabel::Gamma0: return "gamma0";
        case BoundaryLabel::Gamma1: return "gamma1";
    }
    return "all";
}

BoundaryLabel parse_boundary_label(std::string_view text) {
    for (auto label : {BoundaryLabel::All, BoundaryLabel::Left, BoundaryLabel::Right,
                       BoundaryLabel::Bottom, BoundaryLabel::Top, BoundaryLabel::Gamma0,
                       BoundaryLabel::Gamma1}) {
        if (to_string(label) == text) return label;
    }
    throw InputError("unknown boundary label '" + std::string(text) + "'");
}

Grid::Grid(int dimension, std::size_t nx, std::size_t ny) : dimension_(dimension), nx_(nx), ny_(ny) {}

Grid Grid::interval(std::size_t nodes) {
    require(nodes >= 3, "grid needs at least 3 nodes per axis");
    return Grid(1, nodes, 1);
}

Grid Grid::square(std::size_t nodes_per_axis) { return square(nodes_per_axis, nodes_per_axis); }

Grid Grid::square(std::size_t nx, std::size_t ny) {
    require(nx >= 3 && ny >= 3, "grid needs at least 3 nodes per axis");
    return Grid(2, nx, ny);
}

bool Grid::on_edge(std::size_t node, Edge edge) const {
    const auto i = i_of(node);
    const auto j = j_of(node);
    switch (edge) {
        case Edge::Left: return i == 0;
        case Edge::Right: return i == nx_ - 1;
        case Edge::Bottom: return dimension_ == 2 && j == 0;
        case Edge::Top: return dimension_ == 2 && j == ny_ - 1;
    }
    return false;
}

bool Grid::on_boundary(std::size_t node) const {
    return on_edge(node, Edge::Left) || on_edge(node, Edge::Right) ||
           on_edge(node, Edge::Bottom) || on_edge(node, Edge::Top);
}

double Grid::distance_to_boundary(double px, double py) const {
    double d = std::min(px, 1.0 - px);
    if (dimension_ == 2) d = std::min({d, py, 1.0 - py});
    return std::max(d, 0.0);
}

double Grid::distance_to_boundary(std::size_t node) const {
    // Integer arithmetic keeps symmetric nodes bitwise symmetric.
    const auto i = i_of(node);
    double d = static_cast<double>(std::min(i, nx_ - 1 - i)) * hx();
    if (dimension_ == 2) {
        const auto j = j_of(node);
        d = std::min(d, static_cast<double>(std::min(j, ny_ - 1 - j)) * hy());
    }
    return d;
}

bool Grid::has_label(BoundaryLabel label) const {
    switch (label) {
        case BoundaryLabel::All:
        case BoundaryLabel::Left:
        case BoundaryLabel::Right: return true;
        default: return dimension_ == 2;
    }
}

std::vector<Edge> Grid::edges_of(BoundaryLabel label) const {
    require(has_label(label), "boundary label '" + std::string(to_string(label)) +
                                  "' is not defined on a " + std::to_string(dimension_) + "D grid");
    switch (label) {
        case BoundaryLabel::All:
            if (dimension_ == 1) return {Edge::Left, Edge::Right};
            return {Edge::Bottom, Edge::Right, Edge::Top, Edge::Left};
        case BoundaryLabel::Left: return {Edge::Left};
        case BoundaryLabel::Right: return {Edge::Right};
        case BoundaryLabel::Bottom: return {Edge::Bottom};
        case BoundaryLabel::Top: return {Edge::Top};
        case BoundaryLabel::Gamma0: return {Edge::Top, Edge::Right};
        case BoundaryLabel::Gamma1: return {Edge::Bottom, Edge::Left};
    }
    return {};
}

std::vector<Edge> Grid::label_edges_at(std::size_t node, BoundaryLabel label) const {
    std::vector<Edge> result;
    if (label == BoundaryLabel::Gamma1 &&
        (on_edge(node, Edge::Top) || on_edge(node, Edge::Right))) {
        return result;
    }
    for (Edge e : edges_of(label)) {
        if (on_edge(node, e)) result.push_back(e);
    }
    return result;
}

std::vector<std::size_t> Grid::boundary_nodes(BoundaryLabel label) const {
    std::vector<std::size_t> nodes;
    if (dimension_ == 1) {
        if (label == BoundaryLabel::All || label == BoundaryLabel::Left) nodes.push_back(0);
        if (label == BoundaryLabel::All || label == BoundaryLabel::Right) nodes.push_back(nx_ - 1);
        require(!nodes.empty(), "boundary label '" + std::string(to_string(label)) +
                                    "' is not defined on a 1D grid");
        return nodes;
    }
    // Walk the perimeter counter-clockwise from the origin and keep the
    // nodes for which the label owns at least one incident edge.
    std::vector<std::size_t> perimeter;
    for (std::size_t i = 0; i < nx_; ++i) perimeter.push_back(index(i, 0));
    for (std::size_t j = 1; j < ny_; ++j) perimeter.push_back(index(nx_ - 1, j));
    for (std::size_t i = nx_ - 1; i-- > 0;) perimeter.push_back(index(i, ny_ - 1));
    for (std::size_t j = ny_ - 1; j-- > 1;) perimeter.push_back(index(0, j));
    for (auto node : perimeter) {
        if (!label_edges_at(node, label).empty()) nodes.push_back(node);
    }
    return nodes;
}

std::vector<double> Grid::boundary_weights(BoundaryLabel label) const {
    const auto nodes = boundary_nodes(label);
    std::vector<double> w(nodes.size(), 0.0);
    if (dimension_ == 1) {
        std::fill(w.begin(), w.end(), 1.0);
        return w;
    }
    const auto edges = edges_of(label);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto node = nodes[k];
        for (Edge e : edges) {
            if (!on_edge(node, e)) continue;
            const bool horizontal = (e == Edge::Bottom || e == Edge::Top);
            const double h = horizontal ? hx() : hy();
            const auto along = horizontal ? i_of(node) : j_of(node);
            const auto last = horizontal ? nx_ - 1 : ny_ - 1;
            w[k] += (along == 0 || along == last) ? 0.5 * h : h;
        }
    }
    return w;
}

std::vector<double> Grid::quadrature_weights() const {
    std::vector<double> w(size());
    for (std::size_t node = 0; node < size(); ++node) {
        const auto i = i_of(node);
        double wx = (i == 0 || i == nx_ - 1) ? 0.5 * hx() : hx();
        double wy = 1.0;
        if (dimension_ == 2) {
            const auto j = j_of(node);
            wy = (j == 0 || j == ny_ - 1) ? 0.5 * hy() : hy();
        }
        w[node] = wx * wy;
    }
    return w;
}

std::vector<std::size_t> Grid::interior_nodes() const {
    std::vector<std::size_t> nodes;
    for (std::size_t node = 0; node < size(); ++node) {
        if (!on_boundary(node)) nodes.push_back(node);
    }
    return nodes;
}

Grid Grid::refined(std::size_t factor) const {
    require(factor >= 1, "refinement factor must be positive");
    if (dimension_ == 1) return interval((nx_ - 1) * factor + 1);
    return square((nx_ - 1) * factor + 1, (ny_ - 1) * factor + 1);
}

std::size_t Grid::refinement_factor_from(const Grid& fine) const {
    if (fine.dimension_ != dimension_) return 0;
    if ((fine.nx_ - 1) % (nx_ - 1) != 0) return 0;
    const auto f = (fine.nx_ - 1) / (nx_ - 1);
    if (dimension_ == 2 && (fine.ny_ - 1) != f * (ny_ - 1)) return 0;
    return f;
}

}  // namespace obslab
