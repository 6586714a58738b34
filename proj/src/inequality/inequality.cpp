#include "obslab/inequality/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "obslab/domain/norms.hpp"
#include "obslab/domain/operators.hpp"
#include "obslab/domain/rng.hpp"
#include "obslab/domain/spectral.hpp"
#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"

namespace obslab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double energy(const Field& f) {
    const Eigen::Map<const Eigen::VectorXd> v(f.values.data(), static_cast<Eigen::Index>(f.size()));
    return v.dot(energy_form(f.grid) * v);
}

}  // namespace

double hardy_ratio(const Field& f) {
    const Grid& g = f.grid;
    double den = 0.0;
    if (g.dimension() == 1) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const double m = 0.5 * (f[i] + f[i + 1]);
            const double d = g.distance_to_boundary((static_cast<double>(i) + 0.5) * g.hx());
            den += g.hx() * m * m / (d * d);
        }
    } else {
        for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
            for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
                const double m = 0.25 * (f[g.index(i, j)] + f[g.index(i + 1, j)] +
                                         f[g.index(i, j + 1)] + f[g.index(i + 1, j + 1)]);
                const double d = g.distance_to_boundary((static_cast<double>(i) + 0.5) * g.hx(),
                                                        (static_cast<double>(j) + 0.5) * g.hy());
                den += g.cell_measure() * m * m / (d * d);
            }
        }
    }
    if (!(den > 0.0)) throw InputError("Hardy ratio undefined: f vanishes identically");
    return energy(f) / den;
}

double hopf_constant(const Field& u) {
    const Grid& g = u.grid;
    double c = inf;
    for (std::size_t n : g.interior_nodes()) {
        if (!(u[n] > 0.0)) {
            throw InputError("Hopf constant undefined: u is not positive at interior node " +
                             std::to_string(n));
        }
        c = std::min(c, u[n] / g.distance_to_boundary(n));
    }
    require(std::isfinite(c), "Hopf constant needs interior nodes");
    return c;
}

double interpolation_constant(const Field& f, const Field& u) {
    const double fu = norm(hadamard(f, u), NormKind::L2);
    const double h2 = norm(f, NormKind::H2);
    if (!(fu > 0.0 && h2 > 0.0)) throw InputError("interpolation constant undefined: f u vanishes");
    return norm(f, NormKind::L2) / std::sqrt(fu * h2);
}

namespace {

// int_0^h |a + (b - a) s / h|^(-delta) ds for a, b of one sign.
double cell_power(double a, double b, double h, double delta) {
    a = std::abs(a);
    b = std::abs(b);
    if (std::abs(b - a) <= 1e-14 * std::max(a, b)) {
        return a > 0.0 ? h * std::pow(a, -delta) : (delta > 0.0 ? inf : h);
    }
    if (delta == 1.0) {
        if (std::min(a, b) == 0.0) return inf;
        return h * (std::log(b) - std::log(a)) / (b - a);
    }
    if (delta > 1.0 && std::min(a, b) == 0.0) return inf;
    return h * (std::pow(b, 1.0 - delta) - std::pow(a, 1.0 - delta)) / ((1.0 - delta) * (b - a));
}

}  // namespace

double negative_power_integral(const Field& phi, double delta) {
    const Grid& g = phi.grid;
    require(delta >= 0.0, "delta must be nonnegative");
    require(phi.max_abs() > 0.0, "negative power of a vanishing function");
    const double h = g.hx();
    // Nodal values at roundoff level are zeros of the sampled function.
    const double floor = 1e-12 * phi.max_abs();
    auto one_cell = [&](double a, double b, double width) {
        if (delta == 0.0) return width;
        if (std::abs(a) <= floor) a = 0.0;
        if (std::abs(b) <= floor) b = 0.0;
        if (a * b < 0.0) {
            const double s = width * std::abs(a) / (std::abs(a) + std::abs(b));
            return cell_power(a, 0.0, s, delta) + cell_power(0.0, b, width - s, delta);
        }
        return cell_power(a, b, width, delta);
    };
    double s = 0.0;
    if (g.dimension() == 1) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) s += one_cell(phi[i], phi[i + 1], h);
        return s;
    }
    // Square: exact along x inside each cell at the mean of the two rows.
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const double a = 0.5 * (phi[g.index(i, j)] + phi[g.index(i, j + 1)]);
            const double b = 0.5 * (phi[g.index(i + 1, j)] + phi[g.index(i + 1, j + 1)]);
            s += g.hy() * one_cell(a, b, h);
        }
    }
    return s;
}

DeltaEstimate negative_power_delta(const Field& phi, double lo, double hi, std::size_t samples,
                                   double tolerance) {
    require(lo >= 0.0 && hi >= lo && samples >= 1, "invalid delta search range");
    const Grid& g = phi.grid;
    require(g.dimension() == 1 && g.nx() % 2 == 1 && g.nx() >= 5,
            "negative power scan needs a 1D grid with an odd node count >= 5");
    const Field coarse = phi.restrict_to(Grid::interval((g.nx() + 1) / 2));
    DeltaEstimate out;
    std::optional<std::pair<double, double>> best;
    for (std::size_t k = 0; k < samples; ++k) {
        const double delta =
            samples == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
        const double fine = negative_power_integral(phi, delta);
        const double rough = negative_power_integral(coarse, delta);
        double change = inf;
        if (std::isfinite(fine) && std::isfinite(rough)) change = std::abs(fine - rough) / fine;
        out.scanned.push_back(delta);
        out.change.push_back(change);
        if (change < tolerance) best = {delta, fine};
    }
    if (!best) {
        throw NumericalError("no delta in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "] gives a refinement-stable negative-power integral");
    }
    out.delta = best->first;
    out.integral = best->second;
    return out;
}

InequalityReport weighted_l2_bound_check(const Field& f, const Field& phi, double delta) {
    require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
    InequalityReport r;
    r.id = "weighted_l2";
    r.resolution = f.grid.nx();
    r.lhs = norm(f, NormKind::L2);
    const double sup = f.max_abs();
    const double fphi = norm(hadamard(f, phi), NormKind::L2);
    const double p = 1.0 / (2.0 + delta);
    const double base = std::pow(sup, 2.0 * p) * std::pow(fphi, delta * p);
    r.rhs = std::pow(negative_power_integral(phi, delta), p) * base;
    r.constant = base > 0.0 ? r.lhs / base : 0.0;
    r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
    return r;
}

std::vector<InequalityReport> inequality_suite(std::size_t nodes, std::uint64_t seed,
                                               unsigned threads) {
    require(nodes >= 9 && nodes % 2 == 1, "suite resolution must be odd and >= 9");
    using std::numbers::pi;
    const Grid line = Grid::interval(nodes);
    const Grid square = Grid::square(nodes);

    std::vector<std::function<InequalityReport()>> jobs;
    auto hardy = [&](std::string sample, const Grid& g, SpatialFunction fn) {
        jobs.push_back([=] {
            InequalityReport r;
            r.id = "hardy";
            r.sample = sample;
            r.resolution = g.nx();
            r.constant = hardy_ratio(Field::sample(g, fn));
            r.lhs = r.constant;
            r.rhs = 0.25 - 5.0 * g.hx();
            r.pass = r.lhs >= r.rhs;
            return r;
        });
    };
    hardy("sin(pi x)", line, [](double x, double) { return std::sin(pi * x); });
    hardy("x(1-x)", line, [](double x, double) { return x * (1.0 - x); });
    hardy("sin(2 pi x)", line, [](double x, double) { return std::sin(2.0 * pi * x); });
    hardy("x^2(1-x)", line, [](double x, double) { return x * x * (1.0 - x); });
    hardy("sin(pi x) sin(pi y)", square,
          [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
    hardy("x(1-x)y(1-y)", square,
          [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); });

    auto hopf = [&](std::string sample, std::function<Field()> make, std::optional<double> expect) {
        jobs.push_back([=] {
            InequalityReport r;
            r.id = "hopf";
            r.sample = sample;
            r.resolution = nodes;
            r.constant = hopf_constant(make());
            r.lhs = r.constant;
            r.rhs = expect.value_or(0.0);
            r.pass = expect ? std::abs(r.constant - *expect) <= 1e-3 : r.constant > 0.0;
            return r;
        });
    };
    hopf("d(x)", [=] {
        return Field::sample(line, [&](double x, double) { return line.distance_to_boundary(x); });
    }, 1.0);
    hopf("sqrt2 sin(pi x)", [=] {
        return Field::sample(line, [](double x, double) { return std::sqrt(2.0) * std::sin(pi * x); });
    }, 2.0 * std::sqrt(2.0));
    hopf("phi1(q=x)", [=] {
        const Field q = Field::sample(line, [](double x, double) { return x; });
        return dirichlet_eigenpairs(line, q, 1).functions[0];
    }, std::nullopt);
    hopf("phi1 square", [=] {
        return dirichlet_eigenpairs(square, Field::zeros(square), 1).functions[0];
    }, std::nullopt);

    const Field phi1 = Field::sample(line, [](double x, double) { return std::sqrt(2.0) * std::sin(pi * x); });
    jobs.push_back([=] {
        InequalityReport r;
        r.id = "interpolation";
        r.sample = "f=u=phi1";
        r.resolution = nodes;
        r.constant = interpolation_constant(phi1, phi1);
        r.lhs = r.constant;
        return r;
    });
    Xoshiro256 rng(seed);
    for (int s = 0; s < 4; ++s) {
        std::vector<double> c(6);
        for (double& v : c) v = rng.normal();
        jobs.push_back([=] {
            const Field f = Field::sample(line, [&](double x, double) {
                double v = 0.0;
                for (std::size_t k = 0; k < c.size(); ++k) {
                    v += c[k] * std::sin(static_cast<double>(k + 1) * pi * x) /
                         static_cast<double>((k + 1) * (k + 1));
                }
                return v;
            });
            InequalityReport r;
            r.id = "interpolation";
            r.sample = "random sine series " + std::to_string(s);
            r.resolution = nodes;
            r.constant = interpolation_constant(f, phi1);
            r.lhs = r.constant;
            return r;
        });
    }

    const Field phi0 = Field::sample(line, [](double x, double) { return std::sqrt(2.0) * std::cos(pi * x / 2.0); });
    jobs.push_back([=] {
        InequalityReport r;
        r.id = "negative_power";
        r.sample = "phi0 delta=0.5";
        r.resolution = nodes;
        r.constant = negative_power_integral(phi0, 0.5);
        r.lhs = r.constant;
        return r;
    });
    jobs.push_back([=] {
        const auto est = negative_power_delta(phi0, 0.0, 1.5, 16);
        InequalityReport r;
        r.id = "negative_power_delta";
        r.sample = "phi0 scan [0,1.5]";
        r.resolution = nodes;
        r.constant = est.delta;
        r.lhs = est.delta;
        r.rhs = 1.0;
        r.pass = est.delta < 1.0;
        return r;
    });
    jobs.push_back([=] {
        const Field s2 = Field::sample(line, [](double x, double) { return std::sin(2.0 * pi * x); });
        const auto est = negative_power_delta(s2, 0.0, 1.5, 16);
        InequalityReport r;
        r.id = "negative_power_delta";
        r.sample = "sin(2 pi x) scan [0,1.5]";
        r.resolution = nodes;
        r.constant = est.delta;
        r.lhs = est.delta;
        r.rhs = 1.0;
        r.pass = est.delta < 1.0;
        return r;
    });
    jobs.push_back([=] {
        auto r = weighted_l2_bound_check(Field::constant(line, 1.0), phi0, 0.5);
        r.sample = "f=1 phi=phi0 delta=0.5";
        return r;
    });

    std::vector<InequalityReport> out(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t k) { out[k] = jobs[k](); });
    return out;
}

}  // namespace obslab
