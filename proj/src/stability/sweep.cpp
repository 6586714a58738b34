#include "obslab/stability/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "obslab/domain/norms.hpp"
#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"
#include "obslab/recovery/potential.hpp"

namespace obslab {

namespace {

constexpr double pi = std::numbers::pi;

const std::vector<std::pair<std::string, std::vector<std::string>>>& registry() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> r{
        {"potential-heat", {"phi1", "smooth"}},
        {"potential-damping-wave", {"damping", "potential"}},
        {"boundary-damping", {"constant", "linear"}},
    };
    return r;
}

double l2(const Field& f) { return norm(f, NormKind::L2); }

std::string echo(const SweepSpec& s) {
    std::ostringstream o;
    o.precision(17);
    o << "pipeline=" << s.pipeline << " family=" << s.family
      << " nodes=" << s.setup.inversion.nx() << " forward=" << s.setup.forward.nx()
      << " tau=" << s.setup.tau << " dt=" << s.setup.dt << " probes=" << s.recovery.probes
      << " noise=" << s.noise;
    return o.str();
}

std::uint64_t row_seed(std::uint64_t seed, double amplitude) {
    std::uint64_t state = seed ^ fnv1a(&amplitude, sizeof amplitude);
    return splitmix64(state);
}

void run_row(const SweepSpec& spec, SweepRecord& rec) {
    const double amp = rec.amplitude;
    const Grid& grid = spec.setup.inversion;
    Xoshiro256 rng(row_seed(rec.seed, amp));
    const auto zero = [](double, double) { return 0.0; };

    if (spec.pipeline == "potential-heat") {
        SpatialFunction dq;
        if (spec.family == "phi1") {
            dq = [amp](double x, double) { return amp * std::sqrt(2.0) * std::sin(pi * x); };
        } else {
            dq = [amp](double x, double) { return amp * 4.0 * x * (1.0 - x) * (1.0 + x); };
        }
        auto data = potential_heat_data(spec.setup, zero, dq, spec.recovery.probes);
        add_noise(data, spec.noise, rng);
        const auto r = recover_potential_heat(Field::zeros(grid), data, spec.recovery);
        const Field truth = Field::sample(grid, dq);
        rec.distance = r.diagnostics.at("distance");
        rec.error = l2(r.field("perturbation") - truth);
        rec.perturbation = l2(truth);
    } else if (spec.pipeline == "potential-damping-wave") {
        const SpatialFunction shape = [amp](double x, double) { return amp * x * (1.0 - x); };
        const bool damping = spec.family == "damping";
        const SpatialFunction q = damping ? SpatialFunction(zero) : shape;
        const SpatialFunction a = damping ? shape : SpatialFunction(zero);
        auto data = potential_damping_wave_data(spec.setup, zero, q, a, spec.recovery.probes);
        add_noise(data, spec.noise, rng);
        const auto r = recover_potential_damping_wave(Field::zeros(grid), data, spec.recovery);
        const Field qt = Field::sample(grid, q);
        const Field at = Field::sample(grid, a);
        const double eq = l2(r.field("q") - qt);
        const double ea = l2(r.field("a") - at);
        rec.distance = r.diagnostics.at("distance");
        rec.error = std::hypot(eq, ea);
        rec.perturbation = std::hypot(l2(qt), l2(at));
    } else {
        std::function<double(double)> a1, a2;
        if (spec.family == "constant") {
            a1 = a2 = [amp](double) { return amp; };
        } else {
            a1 = [amp](double s) { return amp * (1.0 + s); };
            a2 = [amp](double s) { return amp * (1.0 + 0.5 * s); };
        }
        auto data = boundary_damping_data(spec.setup, a1, a2, spec.recovery.probes);
        add_noise(data, spec.noise, rng);
        const auto r = recover_boundary_damping(grid, data, spec.recovery, spec.damping);
        const Grid edge = Grid::interval(grid.nx());
        const Field t1 = Field::sample(edge, [&](double s, double) { return a1(s); });
        const Field t2 = Field::sample(edge, [&](double s, double) { return a2(s); });
        rec.distance = r.diagnostics.at("distance");
        rec.error = std::hypot(l2(r.field("a1") - t1), l2(r.field("a2") - t2));
        rec.perturbation = std::hypot(l2(t1), l2(t2));
    }
}

}  // namespace

std::vector<std::string> sweep_pipelines() {
    std::vector<std::string> out;
    for (const auto& [id, fams] : registry()) out.push_back(id);
    return out;
}

std::vector<std::string> sweep_families(const std::string& pipeline) {
    for (const auto& [id, fams] : registry()) {
        if (id == pipeline) return fams;
    }
    throw InputError("unknown sweep pipeline '" + pipeline + "'");
}

void SweepSpec::validate() const {
    const auto fams = sweep_families(pipeline);
    require(std::find(fams.begin(), fams.end(), family) != fams.end(),
            "unknown perturbation family '" + family + "' for pipeline " + pipeline);
    require(!amplitudes.empty(), "sweep needs at least one amplitude");
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        require(std::isfinite(amplitudes[k]) && amplitudes[k] >= 0.0,
                "sweep amplitudes must be non-negative");
        if (k > 0) require(amplitudes[k] < amplitudes[k - 1], "sweep amplitudes must decrease");
    }
    require(noise >= 0.0 && std::isfinite(noise), "noise level must be non-negative");
    require(!seeds.empty(), "sweep needs at least one seed");
    setup.validate();
    recovery.validate();
    if (pipeline == "boundary-damping") {
        damping.validate();
        require(setup.inversion.dimension() == 2, "boundary damping runs on the square");
    } else {
        require(setup.inversion.dimension() == 1, pipeline + " sweeps run on the interval");
    }
}

SweepSpec default_sweep(const std::string& pipeline) {
    SweepSpec s;
    s.pipeline = pipeline;
    s.family = sweep_families(pipeline).front();
    if (pipeline == "potential-heat") {
        s.setup.inversion = Grid::interval(101);
        s.setup.forward = Grid::interval(201);
        s.setup.tau = 0.5;
        s.setup.dt = 2.5e-4;
        s.recovery.probes = 10;
        s.recovery.s = 3.0;
        s.amplitudes = {0.3, 0.1, 0.03, 0.01};
    } else if (pipeline == "potential-damping-wave") {
        s.setup.inversion = Grid::interval(101);
        s.setup.forward = Grid::interval(201);
        s.setup.tau = 2.0;
        s.setup.dt = 0.005;
        s.recovery.probes = 1;
        s.amplitudes = {0.4, 0.2, 0.1, 0.05};
    } else {
        s.setup.inversion = Grid::square(21);
        s.setup.forward = Grid::square(41);
        s.setup.tau = 8.0;
        s.setup.dt = 0.02;
        s.setup.label = BoundaryLabel::Gamma1;
        s.recovery.probes = 4;
        s.amplitudes = {0.4, 0.2, 0.1, 0.05};
    }
    return s;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    const std::string config = echo(spec);
    std::vector<SweepRecord> rows;
    for (double a : spec.amplitudes) {
        for (auto seed : spec.seeds) {
            SweepRecord r;
            r.amplitude = a;
            r.seed = seed;
            r.config = config;
            rows.push_back(std::move(r));
        }
    }
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        try {
            run_row(spec, rows[i]);
        } catch (const std::exception& e) {
            rows[i].ok = false;
            rows[i].message = e.what();
            rows[i].distance = rows[i].error = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return rows;
}

RateFit rate_fit(const std::vector<SweepRecord>& records, StabilityModulus::Kind model) {
    std::vector<double> xs, ys;
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (const auto& r : records) {
        if (!r.ok || !(r.distance > 0.0) || !(r.error > 0.0)) continue;
        if (model == StabilityModulus::Kind::LogPower) {
            require(r.distance < 1.0, "log-power fit needs distances below 1");
            xs.push_back(std::log(-std::log(r.distance)));
        } else {
            xs.push_back(std::log(r.distance));
        }
        ys.push_back(std::log(r.error));
        dmin = std::min(dmin, r.distance);
        dmax = std::max(dmax, r.distance);
    }
    require(xs.size() >= 3, "rate fit needs at least 3 rows with positive distance and error");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k] / n;
        my += ys[k] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (!(sxx > 0.0)) throw NumericalError("rate fit: all distances coincide");
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (my + slope * (xs[k] - mx));
        ss += e * e;
    }
    RateFit out;
    out.parameter = model == StabilityModulus::Kind::Holder ? slope : -slope;
    out.residual = std::sqrt(ss / n);
    out.used = xs.size();
    out.low_confidence = dmax < 10.0 * dmin;
    return out;
}

Certificate certify(const std::vector<SweepRecord>& records, const StabilityModulus& modulus) {
    Certificate c;
    c.modulus = modulus.describe();
    const double limit = modulus_domain_limit();
    for (const auto& r : records) {
        if (!r.ok) {
            ++c.skipped;
            continue;
        }
        require(r.distance >= 0.0 && r.error >= 0.0, "sweep record with negative distance or error");
        double rho = r.distance;
        if (rho > limit) {
            rho = limit;
            ++c.clamped;
        }
        ++c.used;
        if (r.error == 0.0) continue;
        const double m = modulus_eval(modulus, rho);
        c.constant = m > 0.0 ? std::max(c.constant, r.error / m) : std::numeric_limits<double>::infinity();
    }
    c.pass = c.used > 0 && std::isfinite(c.constant);
    return c;
}

}  // namespace obslab
