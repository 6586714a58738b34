#pragma once

#include <functional>
#include <span>
#include <vector>

#include "obslab/domain/grid.hpp"

namespace obslab {

using SpatialFunction = std::function<double(double x, double y)>;

/// A real function sampled at the nodes of a grid.
struct Field {
    Grid grid = Grid::interval(3);
    std::vector<double> values;

    Field() = default;
    Field(Grid g, std::vector<double> v);

    static Field zeros(const Grid& grid);
    static Field constant(const Grid& grid, double value);
    static Field sample(const Grid& grid, const SpatialFunction& f);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t node) const { return values[node]; }
    std::span<const double> view() const { return values; }

    /// Copy with all boundary nodes set to zero.
    Field with_zero_boundary() const;
    double max_abs() const;
    double min() const;

    /// Piecewise (bi)linear interpolation at an arbitrary point.
    double interpolate(double x, double y = 0.0) const;
    /// Injection onto a coarser nested grid.
    Field restrict_to(const Grid& coarse) const;
    /// Piecewise (bi)linear prolongation onto any grid.
    Field resample(const Grid& target) const;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

/// Complex field stored as a pair of real fields.
struct ComplexField {
    Field re;
    Field im;
};

}  // namespace obslab
