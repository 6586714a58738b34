#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "obslab/domain/field.hpp"

namespace obslab {

enum class NormKind { L2, H10, H2, V, DualV };

NormKind parse_norm_kind(std::string_view text);
std::string_view to_string(NormKind kind);

/// Trapezoid-rule L2 inner product.
double inner(const Field& a, const Field& b);

/// Discrete norms. H10 is the gradient energy seminorm; H2 adds the L2 norm,
/// the gradient energy and the L2 norm of the closed 4-point Laplacian. V is
/// the gradient energy after zeroing the Dirichlet part of the boundary
/// (Gamma0 on the square, both ends on the interval). DualV treats the field
/// as a density and returns the V-norm of its Riesz representer.
double norm(const Field& f, NormKind kind);

/// Dual V-norm of a functional given by its load vector b_i = ell(e_i) on all
/// nodes; constrained entries are ignored. Returns sqrt(b^T K^{-1} b).
double dual_v_norm_of_load(const Grid& grid, const Eigen::VectorXd& load);

}  // namespace obslab
