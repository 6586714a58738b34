#pragma once

#include "obslab/forward/probes.hpp"
#include "obslab/recovery/config.hpp"
#include "obslab/recovery/result.hpp"

namespace obslab {

/// q from heat responses N(q) - N(q_ref) on probes phi_k of -Delta + q_ref.
/// Each response is deconvolved with exp(-lambda_k t); the recovered source
/// F_k ~ (q - q_ref) phi_k gives m_k = int F_k, and q = q_ref + sum_{k<=l} m_k phi_k
/// with l <= s < l + 1 and the source fits truncated at k <= epsilon^(n/2),
/// epsilon = s^(3/n+1). Later sweeps refit with the eigenbasis of the current
/// estimate. Fields: "q" and "perturbation".
RecoveryResult recover_potential_heat(const Field& q_ref, const ProbeResponseSet& data,
                                      const RecoveryConfig& config, unsigned threads = 1);

/// (q, a) from damped-wave responses Lambda(q, a) - Lambda(q_ref, 0) on complex
/// probes (phi_k, i sqrt(lambda_k) phi_k). The recovered complex source G_k
/// has real part (q - q_ref) phi_k and imaginary part sqrt(lambda_k) a phi_k.
/// Fields: "q" and "a".
RecoveryResult recover_potential_damping_wave(const Field& q_ref, const ProbeResponseSet& data,
                                              const RecoveryConfig& config, unsigned threads = 1);

}  // namespace obslab
