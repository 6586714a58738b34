#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "obslab/domain/field.hpp"

namespace obslab {

struct InequalityReport {
    std::string id;
    double constant = 0.0;     ///< measured constant, finite and >= 0
    std::string sample;
    std::size_t resolution = 0;
    std::optional<bool> pass;  ///< set when a claimed bound exists
    double lhs = 0.0;
    double rhs = 0.0;
};

/// int |grad f|^2 / int f^2 / d^2 with d the exact distance to the boundary.
/// The numerator is the edge energy form, the denominator a cell-midpoint rule.
double hardy_ratio(const Field& f);

/// min over interior nodes of u / d.
double hopf_constant(const Field& u);

/// ||f|| / (||f u||^(1/2) ||f||_H2^(1/2)).
double interpolation_constant(const Field& f, const Field& u);

/// int_0^1 |p|^(-delta) for the piecewise linear interpolant p of a 1D field,
/// integrated exactly cell by cell; +inf when the integral diverges.
double negative_power_integral(const Field& phi, double delta);

struct DeltaEstimate {
    double delta = 0.0;
    double integral = 0.0;
    std::vector<double> scanned;   ///< every delta tried
    std::vector<double> change;    ///< relative change under coarsening (inf if divergent)
};

/// Largest delta in [lo, hi] (uniform scan of `samples` points) whose integral
/// changes by less than `tolerance` when the field is coarsened by 2. Throws
/// NumericalError when no scanned delta is stable.
DeltaEstimate negative_power_delta(const Field& phi, double lo, double hi,
                                   std::size_t samples = 21, double tolerance = 0.05);

/// ||f|| <= (int |phi|^-delta)^(1/(2+delta)) ||f||_inf^(2/(2+delta)) ||f phi||^(delta/(2+delta)).
/// The constant is the realized ratio lhs / (||f||_inf^.. ||f phi||^..).
InequalityReport weighted_l2_bound_check(const Field& f, const Field& phi, double delta);

/// Hardy, Hopf, interpolation, negative-power and weighted-L2 samples on the
/// interval and the square at the given resolution (nodes per axis).
std::vector<InequalityReport> inequality_suite(std::size_t nodes, std::uint64_t seed,
                                               unsigned threads = 1);

}  // namespace obslab
