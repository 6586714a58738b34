#pragma once

#include "obslab/forward/probes.hpp"
#include "obslab/recovery/config.hpp"
#include "obslab/recovery/result.hpp"

namespace obslab {

struct DampingOptions {
    double lower = 0.05;               ///< admissible lower bound a_min >= 0
    double upper = 10.0;               ///< admissible upper bound N
    double delta = 0.5;                ///< regularity index of the Holder exponent
    double holder_constant = 1.0;      ///< c in c (dist / a_min)^(delta / (2 (2 + delta)))
    std::size_t control_points = 5;    ///< piecewise linear nodes per edge, corner shared
    double initial = 0.25;
    std::size_t max_iterations = 40;
    double step_tolerance = 1e-10;     ///< relative step that ends the iteration
    double misfit_tolerance = 0.1;     ///< acceptable misfit relative to ||data|| (covers model error)

    void validate() const;
};

/// (a1, a2) on Gamma1 from square responses Lambda(a) - Lambda(0) observed on
/// Gamma1, by projected Levenberg-Marquardt with a forward-difference Jacobian.
/// Coefficients are the control values: a1 at x_0..x_{P-1}, then a2 at
/// y_1..y_{P-1} (a2(0) = a1(0)). Fields "a1", "a2" on the edge grid. Throws
/// NumericalError with the iterate history on stagnation above tolerance.
RecoveryResult recover_boundary_damping(const Grid& grid, const ProbeResponseSet& data,
                                        const RecoveryConfig& config,
                                        const DampingOptions& options, unsigned threads = 1);

}  // namespace obslab
