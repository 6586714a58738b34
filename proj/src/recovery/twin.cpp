#include "obslab/recovery/twin.hpp"

#include "obslab/errors.hpp"
#include "obslab/forward/heat.hpp"
#include "obslab/forward/trace.hpp"
#include "obslab/forward/wave.hpp"

namespace obslab {

void TwinSetup::validate() const {
    require(inversion.dimension() == forward.dimension(), "twin grids differ in dimension");
    const auto f = inversion.refinement_factor_from(forward);
    require(f >= 2, "inverse-crime guard: the forward grid must be at least 2x finer than the "
                    "inversion grid along each axis and nested in it");
    require(tau > 0.0 && dt > 0.0, "tau and dt must be positive");
    require(time_ratio >= 1, "time ratio must be at least 1");
}

BoundaryTrace source_trace(MapKind kind, const TwinSetup& setup, const SpatialFunction& q,
                           const TimeFunction& g, const SpatialFunction& f) {
    setup.validate();
    require(kind != MapKind::Square, "source traces are defined for the wave and heat maps");
    const Grid& fg = setup.forward;
    const double fdt = setup.forward_dt();
    const std::size_t steps = step_count(setup.tau, fdt);
    Source src{Kernel::sample(g, fdt, steps + 2), Field::sample(fg, f)};
    TraceRecorder recorder(fg, setup.label, fdt, steps);
    SolveOptions options;
    options.keep_history = false;
    options.observer = recorder.observer();
    const Field qf = Field::sample(fg, q);
    const Field zero = Field::zeros(fg);
    if (kind == MapKind::Wave) {
        solve_wave(fg, qf, zero, zero, zero, src, setup.tau, fdt, options);
    } else {
        solve_heat(fg, qf, zero, src, setup.tau, fdt, options);
    }
    return restrict_trace(recorder.take(), fg, setup.inversion, setup.dt);
}

ProbeResponseSet difference(const ProbeResponseSet& a, const ProbeResponseSet& b) {
    require(a.size() == b.size() && a.kind == b.kind, "response sets are not comparable");
    ProbeResponseSet out = a;
    for (std::size_t k = 0; k < a.size(); ++k) {
        require(a.responses[k].id == b.responses[k].id, "response sets use different probes");
        out.responses[k].re = a.responses[k].re - b.responses[k].re;
        if (a.responses[k].im) out.responses[k].im = *a.responses[k].im - *b.responses[k].im;
    }
    return out;
}

namespace {

ProbeResponseSet twin_difference(MapKind kind, const TwinSetup& setup, const MapCoefficients& truth,
                                 const MapCoefficients& ref, const std::vector<Probe>& probes) {
    const double fdt = setup.forward_dt();
    const auto a = initial_to_boundary(kind, setup.forward, truth, probes, setup.tau, fdt,
                                       setup.label, setup.threads);
    const auto b = initial_to_boundary(kind, setup.forward, ref, probes, setup.tau, fdt,
                                       setup.label, setup.threads);
    return restrict_responses(difference(a, b), setup.forward, setup.inversion, setup.dt);
}

}  // namespace

ProbeResponseSet potential_heat_data(const TwinSetup& setup, const SpatialFunction& q_ref,
                                     const SpatialFunction& q_true, std::size_t probes) {
    setup.validate();
    const Grid& fg = setup.forward;
    MapCoefficients ref = MapCoefficients::zero(fg);
    ref.q = Field::sample(fg, q_ref);
    MapCoefficients truth = ref;
    truth.q = Field::sample(fg, q_true);
    const auto basis = dirichlet_eigenpairs(fg, ref.q, probes);
    return twin_difference(MapKind::Heat, setup, truth, ref, eigen_probes(basis, probes));
}

ProbeResponseSet potential_damping_wave_data(const TwinSetup& setup, const SpatialFunction& q_ref,
                                             const SpatialFunction& q_true,
                                             const SpatialFunction& a_true, std::size_t probes) {
    setup.validate();
    const Grid& fg = setup.forward;
    MapCoefficients ref = MapCoefficients::zero(fg);
    ref.q = Field::sample(fg, q_ref);
    MapCoefficients truth = ref;
    truth.q = Field::sample(fg, q_true);
    truth.a = Field::sample(fg, a_true);
    const auto basis = dirichlet_eigenpairs(fg, ref.q, probes);
    return twin_difference(MapKind::Wave, setup, truth, ref, complex_eigen_probes(basis, probes));
}

ProbeResponseSet boundary_damping_data(const TwinSetup& setup, const TimeFunction& a1,
                                       const TimeFunction& a2, std::size_t probes) {
    setup.validate();
    require(setup.forward.dimension() == 2, "boundary damping lives on the square");
    const Grid& fg = setup.forward;
    MapCoefficients ref = MapCoefficients::zero(fg);
    MapCoefficients truth = ref;
    const Grid edge = Grid::interval(fg.nx());
    truth.edge = EdgeDamping{Field::sample(edge, [&](double x, double) { return a1(x); }),
                             Field::sample(edge, [&](double y, double) { return a2(y); })};
    return twin_difference(MapKind::Square, setup, truth, ref, square_probes(fg, probes));
}

void add_noise(BoundaryTrace& trace, double sigma, Xoshiro256& rng) {
    require(sigma >= 0.0, "noise level must be nonnegative");
    if (sigma == 0.0) return;
    for (Eigen::Index n = 1; n < trace.values.rows(); ++n) {
        for (Eigen::Index c = 0; c < trace.values.cols(); ++c) {
            trace.values(n, c) += sigma * rng.normal();
        }
    }
}

void add_noise(ProbeResponseSet& set, double sigma, Xoshiro256& rng) {
    for (auto& r : set.responses) {
        add_noise(r.re, sigma, rng);
        if (r.im) add_noise(*r.im, sigma, rng);
    }
}

}  // namespace obslab
