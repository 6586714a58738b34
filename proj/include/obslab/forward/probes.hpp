#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obslab/domain/spectral.hpp"
#include "obslab/forward/damped_square.hpp"
#include "obslab/forward/solution.hpp"

namespace obslab {

/// Which initial-to-boundary map is sampled.
enum class MapKind {
    Wave,    ///< (u0,u1) -> d_nu u for u_tt - Delta u + q u + a u_t = 0
    Heat,    ///< u0 -> d_nu u for u_t - Delta u + q u = 0
    Square,  ///< u0 -> d_nu u for the boundary-damped wave on the square
};

MapKind parse_map_kind(std::string_view text);

/// Initial data of one probe; complex probes carry imaginary parts and are
/// run as two real problems.
struct Probe {
    std::string id;
    Field u0;
    Field u1;
    std::optional<Field> u0_im;
    std::optional<Field> u1_im;

    bool is_complex() const { return u0_im.has_value() || u1_im.has_value(); }
};

struct MapCoefficients {
    Field q;
    Field a;
    std::optional<EdgeDamping> edge;

    static MapCoefficients zero(const Grid& grid);
};

struct ProbeResponse {
    std::string id;
    BoundaryTrace re;
    std::optional<BoundaryTrace> im;
};

struct ProbeResponseSet {
    MapKind kind = MapKind::Wave;
    BoundaryLabel label = BoundaryLabel::All;
    double tau = 0.0;
    double dt = 0.0;
    std::vector<Probe> probes;
    std::vector<ProbeResponse> responses;

    std::size_t size() const { return responses.size(); }
};

/// Probes (phi_k, 0) from an eigenbasis (heat and wave maps).
std::vector<Probe> eigen_probes(const EigenBasis& basis, std::size_t count);
/// Complex probes (phi_k, i sqrt(lambda_k) phi_k) for the damped wave map.
std::vector<Probe> complex_eigen_probes(const EigenBasis& basis, std::size_t count);
/// Probes (phi_kl, 0) on the square, ordered by eigenvalue then k.
std::vector<Probe> square_probes(const Grid& grid, std::size_t count);

/// One forward solve and trace per probe, ordered by probe index.
ProbeResponseSet initial_to_boundary(MapKind kind, const Grid& grid, const MapCoefficients& coeffs,
                                     const std::vector<Probe>& probes, double tau, double dt,
                                     BoundaryLabel label, unsigned threads = 1);

/// Response set restricted to a coarser nested grid and time step.
ProbeResponseSet restrict_responses(const ProbeResponseSet& fine, const Grid& fine_grid,
                                    const Grid& coarse_grid, double coarse_dt);
BoundaryTrace restrict_trace(const BoundaryTrace& fine, const Grid& fine_grid,
                             const Grid& coarse_grid, double coarse_dt);

/// Norm of a probe in the space on which the map acts: (H2 x H10) for the
/// wave, H10 + ||Delta u||_H10 for the heat, sqrt(||u||_V^2 + ||Delta u||^2)
/// for the square.
double probe_norm(MapKind kind, const Probe& probe);
/// Norm of a trace in the data space: H1 in time for wave and heat, L2 for
/// the square.
double data_norm(MapKind kind, const BoundaryTrace& trace, const Grid& grid);

/// sup over probes of ||response difference|| / ||probe||. Computed on a
/// finite dictionary, so it under-estimates the operator norm.
double operator_distance(const ProbeResponseSet& a, const ProbeResponseSet& b, const Grid& grid);

/// Empirical lower estimate of the observability constant: minimum over the
/// dictionary of ||d_nu u||_{L2(Gamma x (0,tau))} divided by the energy norm
/// of the initial data (wave, square) or by ||u(tau)|| (heat).
double estimate_observability_constant(MapKind kind, const Grid& grid,
                                       const MapCoefficients& coeffs,
                                       const std::vector<Probe>& probes, BoundaryLabel label,
                                       double tau, double dt, unsigned threads = 1);

}  // namespace obslab
