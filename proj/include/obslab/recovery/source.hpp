#pragma once

#include "obslab/domain/spectral.hpp"
#include "obslab/domain/series.hpp"
#include "obslab/recovery/config.hpp"
#include "obslab/recovery/result.hpp"

namespace obslab {

/// f from the trace of v with v_tt - Delta v + q v = g(t) f, zero initial data.
/// The trace is deconvolved into d_nu w for the velocity problem w(0) = 0,
/// w_t(0) = f, and the coefficients (f, phi_k) are fitted against the
/// dictionary sin(sqrt(lambda_k) t) / sqrt(lambda_k) d_nu phi_k. The basis
/// (with its potential q) lives on the trace's grid.
RecoveryResult recover_source_wave(const Kernel& g, const BoundaryTrace& trace,
                                   const EigenBasis& basis, const RecoveryConfig& config);

/// f from the trace of v with v_t - Delta v + q v = g(t) f, v(0) = 0. The
/// dictionary is exp(-lambda_k t) d_nu phi_k and the retained count is the
/// integer k with k <= epsilon^(n/2) < k + 1.
RecoveryResult recover_source_heat(const Kernel& g, const BoundaryTrace& trace,
                                   const EigenBasis& basis, const RecoveryConfig& config);

/// Sum of squared coefficients (f, phi_k) for k > l over the basis.
double tail_energy(const Field& f, const EigenBasis& basis, std::size_t l);

}  // namespace obslab
