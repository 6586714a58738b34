#pragma once

#include <cstddef>

namespace obslab {

/// Parameters shared by the recovery pipelines.
struct RecoveryConfig {
    std::size_t probes = 10;          ///< K, number of probes
    std::size_t truncation = 0;       ///< l, retained modes; 0 derives it from s
    double regularization = 1e-12;    ///< Tikhonov weight floor relative to sigma_max^2
    double epsilon = 1.0;             ///< heat truncation parameter, >= 1
    double s = 1.0;                   ///< stability parameter, >= 1
    double noise_level = 0.0;         ///< declared standard deviation of trace noise
    double theta = 0.1;               ///< division threshold relative to max |phi_k|
    std::size_t max_modes = 40;       ///< cap on dictionary size
    std::size_t smoothing_width = 1;  ///< moving average before deconvolution
    std::size_t outer_iterations = 2; ///< relinearization sweeps for potentials
    double condition_limit = 1e12;

    /// Throws InputError on violated invariants (K >= l >= 1, epsilon >= 1, s >= 1).
    void validate() const;
    /// l if set, else the integer with l <= s < l + 1.
    std::size_t retained_modes() const;
};

/// The integer l with l <= s < l + 1.
std::size_t level_from_s(double s);
/// epsilon = s^(3/n + 1) in dimension n.
double epsilon_from_s(double s, int dimension);
/// The integer k with k <= epsilon^(n/2) < k + 1.
std::size_t heat_mode_count(double epsilon, int dimension);

}  // namespace obslab
