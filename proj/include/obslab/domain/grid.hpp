#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace obslab {

/// Straight pieces of the boundary of (0,1) or (0,1)^2.
/// On the interval only Left (x=0) and Right (x=1) exist.
enum class Edge { Left, Right, Bottom, Top };

/// Named boundary subsets. Gamma0 = top and right edges, Gamma1 = bottom and
/// left edges; corners touching Gamma0 belong to Gamma0, so Gamma1 owns only
/// the corner at the origin.
enum class BoundaryLabel { All, Left, Right, Bottom, Top, Gamma0, Gamma1 };

std::string_view to_string(BoundaryLabel label);
BoundaryLabel parse_boundary_label(std::string_view text);

/// Uniform node grid on (0,1) or (0,1)^2 with spacing 1/(nodes-1) per axis.
/// Nodes are numbered x-fastest: index = i + nx * j.
class Grid {
public:
    static Grid interval(std::size_t nodes);
    static Grid square(std::size_t nodes_per_axis);
    static Grid square(std::size_t nx, std::size_t ny);

    int dimension() const { return dimension_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return nx_ * ny_; }
    double hx() const { return 1.0 / static_cast<double>(nx_ - 1); }
    double hy() const { return dimension_ == 1 ? 1.0 : 1.0 / static_cast<double>(ny_ - 1); }
    /// Area (length in 1D) of one cell.
    double cell_measure() const { return dimension_ == 1 ? hx() : hx() * hy(); }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return i + nx_ * j; }
    std::size_t i_of(std::size_t node) const { return node % nx_; }
    std::size_t j_of(std::size_t node) const { return node / nx_; }
    double x(std::size_t node) const { return static_cast<double>(i_of(node)) * hx(); }
    double y(std::size_t node) const {
        return dimension_ == 1 ? 0.0 : static_cast<double>(j_of(node)) * hy();
    }

    bool on_edge(std::size_t node, Edge edge) const;
    bool on_boundary(std::size_t node) const;
    /// Exact Euclidean distance to the boundary (minimum over edges).
    double distance_to_boundary(std::size_t node) const;
    double distance_to_boundary(double x, double y = 0.5) const;

    bool has_label(BoundaryLabel label) const;
    std::vector<Edge> edges_of(BoundaryLabel label) const;
    /// Nodes carrying the label, in a fixed order (see grid.cpp).
    std::vector<std::size_t> boundary_nodes(BoundaryLabel label) const;
    /// Edges of `label` that contain `node`; the outward normals used by traces.
    std::vector<Edge> label_edges_at(std::size_t node, BoundaryLabel label) const;
    /// Quadrature weight of a labelled boundary node for integrals over the
    /// labelled boundary (trapezoid along each edge; 1 per endpoint in 1D).
    std::vector<double> boundary_weights(BoundaryLabel label) const;

    /// Trapezoid weights for volume integrals; boundary nodes weighted 1/2 per axis.
    std::vector<double> quadrature_weights() const;
    /// Interior (non-boundary) nodes in increasing order.
    std::vector<std::size_t> interior_nodes() const;

    /// The grid whose cells are `factor` times smaller along every axis.
    Grid refined(std::size_t factor) const;
    /// Whether `fine` nests this grid (fine spacing divides ours).
    std::size_t refinement_factor_from(const Grid& fine) const;

    bool operator==(const Grid& other) const = default;

private:
    Grid(int dimension, std::size_t nx, std::size_t ny);
    int dimension_ = 1;
    std::size_t nx_ = 3;
    std::size_t ny_ = 1;
};

}  // namespace obslab
