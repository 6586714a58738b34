#pragma once

#include <complex>
#include <vector>

#include "obslab/domain/field.hpp"

namespace obslab {

/// Eigenpairs of -Delta_h + q with Dirichlet conditions, sorted by eigenvalue,
/// orthonormal in the trapezoid inner product.
struct EigenBasis {
    std::vector<double> values;
    std::vector<Field> functions;
    Field potential;

    std::size_t size() const { return values.size(); }
};

EigenBasis dirichlet_eigenpairs(const Grid& grid, const Field& q, std::size_t count);

/// lambda_kl = ((k+1/2)^2 + (l+1/2)^2) pi^2.
double mixed_square_eigenvalue(int k, int l);

struct MixedMode {
    double eigenvalue = 0.0;
    Field function;
};

/// 2 cos((k+1/2) pi x) cos((l+1/2) pi y): zero on the top and right edges,
/// zero normal derivative on the bottom and left edges.
MixedMode mixed_square_eigenpairs(const Grid& grid, int k, int l);

/// Root mu of (-Delta + q + a mu + mu^2) phi = 0 with psi = mu phi.
struct DampedEigenPair {
    std::complex<double> mu;
    ComplexField phi;
    ComplexField psi;
    double residual = 0.0;  ///< relative discrete L2 residual
};

/// The `count` roots of smallest modulus (ties broken by imaginary part),
/// each eigenfunction normalized to unit L2 norm with its largest entry real
/// and positive.
std::vector<DampedEigenPair> damped_quadratic_eigenpairs(const Grid& grid, const Field& q,
                                                         const Field& a, std::size_t count);

}  // namespace obslab
