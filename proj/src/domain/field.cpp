#include "obslab/domain/field.hpp"

#include <algorithm>
#include <cmath>

#include "obslab/errors.hpp"

namespace obslab {

Field::Field(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    require(values.size() == grid.size(), "field node count does not match its grid");
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(grid.size(), 0.0)); }

Field Field::constant(const Grid& grid, double value) {
    return Field(grid, std::vector<double>(grid.size(), value));
}

Field Field::sample(const Grid& grid, const SpatialFunction& f) {
    std::vector<double> v(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) v[n] = f(grid.x(n), grid.y(n));
    return Field(grid, std::move(v));
}

Field Field::with_zero_boundary() const {
    Field out = *this;
    for (std::size_t n = 0; n < size(); ++n) {
        if (grid.on_boundary(n)) out.values[n] = 0.0;
    }
    return out;
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Field::min() const { return *std::min_element(values.begin(), values.end()); }

double Field::interpolate(double px, double py) const {
    auto locate = [](double p, std::size_t n, std::size_t& cell, double& frac) {
        const double s = std::clamp(p, 0.0, 1.0) * static_cast<double>(n - 1);
        cell = std::min(static_cast<std::size_t>(s), n - 2);
        frac = s - static_cast<double>(cell);
    };
    std::size_t i = 0;
    double fx = 0.0;
    locate(px, grid.nx(), i, fx);
    if (grid.dimension() == 1) {
        return (1.0 - fx) * values[i] + fx * values[i + 1];
    }
    std::size_t j = 0;
    double fy = 0.0;
    locate(py, grid.ny(), j, fy);
    const double v00 = values[grid.index(i, j)];
    const double v10 = values[grid.index(i + 1, j)];
    const double v01 = values[grid.index(i, j + 1)];
    const double v11 = values[grid.index(i + 1, j + 1)];
    return (1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 + (1.0 - fx) * fy * v01 +
           fx * fy * v11;
}

Field Field::restrict_to(const Grid& coarse) const {
    const auto f = coarse.refinement_factor_from(grid);
    require(f >= 1, "restriction target is not nested in the source grid");
    std::vector<double> v(coarse.size());
    for (std::size_t n = 0; n < coarse.size(); ++n) {
        v[n] = values[grid.index(coarse.i_of(n) * f, coarse.j_of(n) * f)];
    }
    return Field(coarse, std::move(v));
}

Field Field::resample(const Grid& target) const {
    if (target == grid) return *this;
    if (target.refinement_factor_from(grid) >= 1) return restrict_to(target);
    require(target.dimension() == grid.dimension(), "resample across dimensions");
    std::vector<double> v(target.size());
    for (std::size_t n = 0; n < target.size(); ++n) {
        v[n] = interpolate(target.x(n), target.y(n));
    }
    return Field(target, std::move(v));
}

namespace {
void check_same(const Field& a, const Field& b) {
    require(a.grid == b.grid, "fields live on different grids");
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
    check_same(a, b);
    Field out = a;
    for (std::size_t n = 0; n < a.size(); ++n) out.values[n] += b.values[n];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    check_same(a, b);
    Field out = a;
    for (std::size_t n = 0; n < a.size(); ++n) out.values[n] -= b.values[n];
    return out;
}

Field operator*(double s, const Field& a) {
    Field out = a;
    for (double& v : out.values) v *= s;
    return out;
}

Field hadamard(const Field& a, const Field& b) {
    check_same(a, b);
    Field out = a;
    for (std::size_t n = 0; n < a.size(); ++n) out.values[n] *= b.values[n];
    return out;
}

}  // namespace obslab
