#pragma once

#include <functional>

#include "obslab/domain/rng.hpp"
#include "obslab/forward/probes.hpp"

namespace obslab {

/// Grids and sampling of a twin experiment: data are computed on `forward`
/// with step dt / time_ratio and restricted to `inversion` with step dt.
struct TwinSetup {
    Grid inversion = Grid::interval(3);
    Grid forward = Grid::interval(5);
    double tau = 1.0;
    double dt = 0.1;
    std::size_t time_ratio = 2;
    BoundaryLabel label = BoundaryLabel::All;
    unsigned threads = 1;

    double forward_dt() const { return dt / static_cast<double>(time_ratio); }
    /// Forward grid at least 2x finer along every axis and nested.
    void validate() const;
};

using TimeFunction = std::function<double(double)>;

/// Restricted trace of v with zero initial data and source g(t) f(x):
/// v_tt - Delta v + q v = g f (Wave) or v_t - Delta v + q v = g f (Heat).
BoundaryTrace source_trace(MapKind kind, const TwinSetup& setup, const SpatialFunction& q,
                           const TimeFunction& g, const SpatialFunction& f);

/// Responses of the truth minus the reference, restricted to the inversion
/// grid. Heat: probes phi_k of -Delta + q_ref. Wave: complex probes
/// (phi_k, i sqrt(lambda_k) phi_k) with truth (q, a) and reference (q_ref, 0).
ProbeResponseSet potential_heat_data(const TwinSetup& setup, const SpatialFunction& q_ref,
                                     const SpatialFunction& q_true, std::size_t probes);
ProbeResponseSet potential_damping_wave_data(const TwinSetup& setup, const SpatialFunction& q_ref,
                                             const SpatialFunction& q_true,
                                             const SpatialFunction& a_true, std::size_t probes);
/// Square: Lambda(a) - Lambda(0) on Gamma1 for the first `probes` mixed modes.
ProbeResponseSet boundary_damping_data(const TwinSetup& setup, const TimeFunction& a1,
                                       const TimeFunction& a2, std::size_t probes);

/// Adds N(0, sigma^2) noise to every sample except the t = 0 row, which the
/// deconvolution requires to vanish.
void add_noise(BoundaryTrace& trace, double sigma, Xoshiro256& rng);
void add_noise(ProbeResponseSet& set, double sigma, Xoshiro256& rng);

/// Componentwise difference of two response sets over the same probes.
ProbeResponseSet difference(const ProbeResponseSet& a, const ProbeResponseSet& b);

}  // namespace obslab
