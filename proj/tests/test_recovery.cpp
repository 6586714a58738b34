#include <cmath>
#include <vector>

#include "doctest.h"
#include "obslab/domain/norms.hpp"
#include "obslab/errors.hpp"
#include "obslab/forward/heat.hpp"
#include "obslab/recovery/boundary_damping.hpp"
#include "obslab/recovery/least_squares.hpp"
#include "obslab/recovery/potential.hpp"
#include "obslab/recovery/source.hpp"
#include "obslab/recovery/twin.hpp"
#include "oracles.hpp"

using namespace obslab;
using oracle::pi;

namespace {

double mode(int k, double x) { return std::sqrt(2.0) * std::sin(k * pi * x); }

double rel_error(const Field& a, const Field& b) {
    return norm(a - b, NormKind::L2) / norm(b, NormKind::L2);
}

TwinSetup wave_setup() {
    TwinSetup s;
    s.inversion = Grid::interval(101);
    s.forward = Grid::interval(201);
    s.tau = 2.0;
    s.dt = 0.005;
    return s;
}

TwinSetup heat_setup() {
    TwinSetup s;
    s.inversion = Grid::interval(101);
    s.forward = Grid::interval(201);
    s.tau = 0.5;
    s.dt = 2.5e-4;
    return s;
}

TwinSetup square_setup() {
    TwinSetup s;
    s.inversion = Grid::square(21);
    s.forward = Grid::square(41);
    s.tau = 8.0;
    s.dt = 0.02;
    s.label = BoundaryLabel::Gamma1;
    return s;
}

const auto zero_q = [](double, double) { return 0.0; };

}  // namespace

TEST_CASE("truncation rules bracket exactly") {
    for (double s = 1.0; s < 12.0; s += 0.137) {
        const auto l = level_from_s(s);
        CHECK(static_cast<double>(l) <= s);
        CHECK(s < static_cast<double>(l + 1));
        for (int n : {1, 2}) {
            const double eps = epsilon_from_s(s, n);
            CHECK(eps == doctest::Approx(std::pow(s, 3.0 / n + 1.0)));
            const auto k = heat_mode_count(eps, n);
            const double e = std::pow(eps, n / 2.0);
            CHECK(static_cast<double>(k) <= e);
            CHECK(e < static_cast<double>(k + 1));
        }
    }
    CHECK(level_from_s(3.0) == 3);
    CHECK(heat_mode_count(1.0, 1) == 1);
    CHECK(heat_mode_count(4.0, 1) == 2);
    CHECK(heat_mode_count(3.99, 1) == 1);
    CHECK(heat_mode_count(9.0, 2) == 9);
    CHECK(epsilon_from_s(2.0, 1) == doctest::Approx(16.0));
}

TEST_CASE("recovery config invariants") {
    RecoveryConfig c;
    c.probes = 3;
    c.s = 3.5;
    CHECK_NOTHROW(c.validate());
    CHECK(c.retained_modes() == 3);
    c.s = 4.0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c.s = 0.5;
    CHECK_THROWS_AS(c.validate(), InputError);
    c.s = 1.0;
    c.epsilon = 0.9;
    CHECK_THROWS_AS(c.validate(), InputError);
    c.epsilon = 1.0;
    c.truncation = 2;
    CHECK(c.retained_modes() == 2);
}

TEST_CASE("tikhonov solve") {
    Eigen::MatrixXd a(4, 2);
    a << 1, 0, 0, 2, 1, 1, 0, 1;
    const Eigen::VectorXd x(Eigen::Vector2d(0.5, -1.5));
    const Eigen::VectorXd b = a * x;
    const auto exact = tikhonov_solve(a, b, 0.0);
    CHECK((exact.x - x).norm() < 1e-10);
    CHECK(exact.weight == doctest::Approx(1e-12 * exact.singular_values(0) * exact.singular_values(0)));

    const auto reg = tikhonov_solve(a, b, 0.3);
    CHECK(reg.residual == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(reg.x.norm() < x.norm());

    Eigen::MatrixXd bad(3, 2);
    bad << 1, 1, 1, 1 + 1e-14, 1, 1;
    CHECK_THROWS_AS(tikhonov_solve(bad, Eigen::VectorXd::Ones(3), 0.0), NumericalError);
    CHECK_THROWS_AS(tikhonov_solve(bad, Eigen::VectorXd::Ones(2), 0.0), InputError);
}

TEST_CASE("twin setup guards and noise") {
    TwinSetup s = wave_setup();
    s.forward = s.inversion;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("inverse-crime"), InputError);
    s.forward = Grid::interval(151);
    CHECK_THROWS_AS(s.validate(), InputError);

    BoundaryTrace t;
    t.dt = 0.1;
    t.values = Eigen::MatrixXd::Zero(5, 2);
    Xoshiro256 a(11), b(11);
    BoundaryTrace u = t;
    add_noise(t, 0.1, a);
    add_noise(u, 0.1, b);
    CHECK(t.values.row(0).norm() == 0.0);
    CHECK(t.values.bottomRows(4).norm() > 0.0);
    CHECK(t.values == u.values);
}

TEST_CASE("wave source: single mode") {
    const TwinSetup s = wave_setup();
    const auto g = [](double t) { return std::exp(-t); };
    const auto y = source_trace(MapKind::Wave, s, zero_q, g, [](double x, double) { return mode(1, x); });
    const auto basis = dirichlet_eigenpairs(s.inversion, Field::zeros(s.inversion), 40);
    RecoveryConfig c;
    c.truncation = 5;
    c.s = 5.0;
    const auto r = recover_source_wave(Kernel::sample(g, s.dt, y.steps()), y, basis, c);
    REQUIRE(r.modes.size() == 5);
    CHECK(r.modes[0].coefficient == doctest::Approx(1.0).epsilon(1e-2));
    for (std::size_t k = 1; k < 5; ++k) CHECK(std::abs(r.modes[k].coefficient) <= 1e-2);
    CHECK(r.diagnostics.at("condition_number") < 10.0);
}

TEST_CASE("wave source: two modes and noise sweep") {
    const TwinSetup s = wave_setup();
    const auto g = [](double t) { return std::exp(-t); };
    const auto f = [](double x, double) { return mode(1, x) + 0.5 * mode(3, x); };
    const auto y = source_trace(MapKind::Wave, s, zero_q, g, f);
    const auto basis = dirichlet_eigenpairs(s.inversion, Field::zeros(s.inversion), 40);
    const Kernel ker = Kernel::sample(g, s.dt, y.steps());
    const Field truth = Field::sample(s.inversion, f);
    const std::vector<double> expect{1.0, 0.0, 0.5, 0.0, 0.0};
    for (double sigma : {0.0, 1e-4, 1e-3, 1e-2}) {
        CAPTURE(sigma);
        BoundaryTrace noisy = y;
        Xoshiro256 rng(2024);
        add_noise(noisy, sigma, rng);
        RecoveryConfig c;
        c.truncation = 5;
        c.s = 5.0;
        c.noise_level = sigma;
        const auto r = recover_source_wave(ker, noisy, basis, c);
        if (sigma == 0.0) {
            for (std::size_t k = 0; k < 5; ++k) {
                CHECK(std::abs(r.modes[k].coefficient - expect[k]) <= 2e-2);
            }
        }
        CHECK(r.bound >= norm(r.field("f") - truth, NormKind::L2));
    }
}

TEST_CASE("wave source preconditions") {
    const TwinSetup s = wave_setup();
    const auto y = source_trace(MapKind::Wave, s, zero_q, [](double t) { return t; },
                                [](double x, double) { return mode(1, x); });
    const auto basis = dirichlet_eigenpairs(s.inversion, Field::zeros(s.inversion), 10);
    RecoveryConfig c;
    const Kernel vanishing = Kernel::sample([](double t) { return t; }, s.dt, y.steps());
    CHECK_THROWS_AS(recover_source_wave(vanishing, y, basis, c), InputError);
    const Kernel other_dt = Kernel::sample([](double) { return 1.0; }, 2 * s.dt, y.steps());
    CHECK_THROWS_AS(recover_source_wave(other_dt, y, basis, c), InputError);
}

TEST_CASE("heat source: single mode and truncation") {
    TwinSetup s = heat_setup();
    s.dt = 1e-3;
    const auto g = [](double t) { return 1.0 + t; };
    const auto y = source_trace(MapKind::Heat, s, zero_q, g, [](double x, double) { return mode(1, x); });
    const auto basis = dirichlet_eigenpairs(s.inversion, Field::zeros(s.inversion), 40);
    const Kernel ker = Kernel::sample(g, s.dt, y.steps());

    RecoveryConfig c;
    c.epsilon = 1.0;
    auto r = recover_source_heat(ker, y, basis, c);
    REQUIRE(r.modes.size() == 1);
    CHECK(r.modes[0].coefficient == doctest::Approx(1.0).epsilon(2e-2));
    const Field truth = Field::sample(s.inversion, [](double x, double) { return mode(1, x); });
    CHECK(r.bound >= norm(r.field("f") - truth, NormKind::L2));

    c.epsilon = 25.0;
    r = recover_source_heat(ker, y, basis, c);
    REQUIRE(r.modes.size() == 5);
    CHECK(r.modes[0].coefficient == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(r.bound >= norm(r.field("f") - truth, NormKind::L2));

    const auto& sens = r.series.at("sensitivity");
    const double closed = std::exp((basis.values[4] - basis.values[0]) * s.tau);
    CHECK(sens[4] / sens[0] == doctest::Approx(closed).epsilon(1e-9));

    // Solver oracle on a horizon where mode 5 stays well above roundoff.
    const double horizon = 0.05;
    auto gain = [&](int k) {
        const auto sol = solve_heat(s.inversion, Field::zeros(s.inversion), basis.functions[k],
                                    std::nullopt, horizon, s.dt);
        return norm(sol.u.back(), NormKind::L2);
    };
    const double solver_ratio = gain(0) / gain(4);
    const double closed_short = std::exp((basis.values[4] - basis.values[0]) * horizon);
    CHECK(closed_short / solver_ratio > 1.0 / 3.0);
    CHECK(closed_short / solver_ratio < 3.0);

    c.epsilon = 1e6;
    c.max_modes = 12;
    r = recover_source_heat(ker, y, basis, c);
    CHECK(r.modes.size() == 12);
    bool capped = false, flagged = false;
    for (const auto& f : r.flags) {
        capped |= f.find("capped") != std::string::npos;
        flagged |= f.find("beyond credible conditioning") != std::string::npos;
    }
    CHECK(capped);
    CHECK(flagged);
}

TEST_CASE("tail energy bound") {
    const Grid g = Grid::interval(401);
    const auto basis = dirichlet_eigenpairs(g, Field::zeros(g), 120);
    const Field dq = Field::sample(g, [](double x, double) { return x * x * (1.0 - x); });
    // W^{1,infinity} norm: max(|f|, |f'|) with f' = 2x - 3x^2, largest |f'| = 1 at x = 1.
    const double n_bound = 1.0;
    for (std::size_t l = 1; l <= 10; ++l) {
        CAPTURE(l);
        const double tail = tail_energy(dq, basis, l);
        CHECK(tail <= n_bound * n_bound / ((l + 1.0) * (l + 1.0)));
        // Direct summation of closed-form sine coefficients.
        double direct = 0.0;
        for (int k = static_cast<int>(l) + 1; k <= 120; ++k) {
            const double c = oracle::simpson([k](double x) { return x * x * (1 - x) * mode(k, x); }, 0, 1, 4000);
            direct += c * c;
        }
        CHECK(tail == doctest::Approx(direct).epsilon(1e-3).scale(1e-12));
    }
}

TEST_CASE("heat potential: zero data and probe mismatch") {
    const TwinSetup s = heat_setup();
    const auto data = potential_heat_data(s, zero_q, zero_q, 4);
    RecoveryConfig c;
    c.probes = 4;
    c.s = 3.0;
    const auto r = recover_potential_heat(Field::zeros(s.inversion), data, c);
    CHECK(r.field("perturbation").max_abs() <= 1e-8);
    CHECK(r.modes.size() == 3);

    auto swapped = data;
    std::swap(swapped.probes[0], swapped.probes[1]);
    CHECK_THROWS_WITH_AS(recover_potential_heat(Field::zeros(s.inversion), swapped, c),
                         doctest::Contains("probe/basis mismatch"), InputError);
}

TEST_CASE("heat potential: twin experiment") {
    const TwinSetup s = heat_setup();
    const auto dq = [](double x, double) { return 0.3 * mode(1, x); };
    const auto data = potential_heat_data(s, zero_q, dq, 10);
    RecoveryConfig c;
    c.probes = 10;
    c.s = 3.0;
    const auto r = recover_potential_heat(Field::zeros(s.inversion), data, c);
    const Field truth = Field::sample(s.inversion, dq);
    CHECK(rel_error(r.field("perturbation"), truth) <= 0.1);
    CHECK(r.diagnostics.at("epsilon") == doctest::Approx(81.0));
    CHECK(r.diagnostics.at("heat_modes") == 9.0);
    CHECK(r.diagnostics.at("level") == 3.0);
    CHECK(r.bound >= norm(r.field("perturbation") - truth, NormKind::L2));
    CHECK(r.diagnostics.at("theta_power") == doctest::Approx(0.2));
    CHECK(r.diagnostics.at("theta") > 0.0);
}

TEST_CASE("heat potential: mode isolation") {
    const TwinSetup s = heat_setup();
    RecoveryConfig c;
    c.probes = 4;
    c.s = 3.0;
    for (int k = 1; k <= 3; ++k) {
        CAPTURE(k);
        const auto data = potential_heat_data(s, zero_q, [k](double x, double) { return 0.2 * mode(k, x); }, 4);
        const auto r = recover_potential_heat(Field::zeros(s.inversion), data, c);
        const double mk = r.modes[k - 1].coefficient;
        CHECK(mk == doctest::Approx(0.2).epsilon(0.02));
        for (int j = 1; j <= 3; ++j) {
            if (j != k) CHECK(std::abs(r.modes[j - 1].coefficient) <= 1e-2 * std::abs(mk));
        }
    }
}

TEST_CASE("heat potential: error is linear in amplitude") {
    const TwinSetup s = heat_setup();
    RecoveryConfig c;
    c.probes = 3;
    c.s = 3.0;
    std::vector<double> amps{1e-3, 1e-2, 1e-1}, errs;
    for (double a : amps) {
        const auto dq = [a](double x, double) { return a * x * (1 - x) * (1 + x); };
        const auto data = potential_heat_data(s, zero_q, dq, 3);
        const auto r = recover_potential_heat(Field::zeros(s.inversion), data, c);
        errs.push_back(norm(r.field("perturbation") - Field::sample(s.inversion, dq), NormKind::L2));
    }
    CHECK(oracle::loglog_slope(amps, errs) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("damped wave: zero data") {
    const TwinSetup s = wave_setup();
    const auto data = potential_damping_wave_data(s, zero_q, zero_q, zero_q, 1);
    RecoveryConfig c;
    c.probes = 1;
    const auto r = recover_potential_damping_wave(Field::zeros(s.inversion), data, c);
    CHECK(r.field("a").max_abs() <= 1e-8);
    CHECK(r.field("q").max_abs() <= 1e-8);
}

TEST_CASE("damped wave: damping recovery and swap test") {
    const TwinSetup s = wave_setup();
    RecoveryConfig c;
    c.probes = 1;
    const auto a = [](double x, double) { return 0.2 * x * (1 - x); };
    auto data = potential_damping_wave_data(s, zero_q, zero_q, a, 1);
    auto r = recover_potential_damping_wave(Field::zeros(s.inversion), data, c);
    const Field truth = Field::sample(s.inversion, a);
    CHECK(rel_error(r.field("a"), truth) <= 0.15);
    CHECK(r.field("q").max_abs() <= 1e-3 * truth.max_abs());
    CHECK(r.bound >= 0.0);
    CHECK(r.diagnostics.count("interpolation_constant") == 1);

    const auto q = [](double x, double) { return 0.5 * x * (1 - x); };
    data = potential_damping_wave_data(s, zero_q, q, zero_q, 1);
    r = recover_potential_damping_wave(Field::zeros(s.inversion), data, c);
    CHECK(r.diagnostics.at("imag_to_real") <= 1e-3);
    CHECK(rel_error(r.field("q"), Field::sample(s.inversion, q)) <= 0.15);
}

TEST_CASE("boundary damping: constant profile") {
    const TwinSetup s = square_setup();
    const auto data = boundary_damping_data(s, [](double) { return 0.5; }, [](double) { return 0.5; }, 4);
    RecoveryConfig c;
    c.probes = 4;
    DampingOptions o;
    const auto r = recover_boundary_damping(s.inversion, data, c, o);
    const Field truth = Field::constant(Grid::interval(21), 0.5);
    CHECK(rel_error(r.field("a1"), truth) <= 0.05);
    CHECK(rel_error(r.field("a2"), truth) <= 0.05);
    CHECK(r.modes.size() == 2 * o.control_points - 1);
    CHECK(r.diagnostics.at("holder_exponent") == doctest::Approx(0.1));
    CHECK(r.series.at("dual_norm").size() == 4);
    CHECK(r.bound > 0.0);
}

TEST_CASE("boundary damping: zero data and stagnation") {
    const TwinSetup s = square_setup();
    RecoveryConfig c;
    c.probes = 2;
    DampingOptions o;
    o.lower = 0.0;
    const auto zero = boundary_damping_data(s, [](double) { return 0.0; }, [](double) { return 0.0; }, 2);
    const auto r = recover_boundary_damping(s.inversion, zero, c, o);
    CHECK(r.field("a1").max_abs() <= 1e-8);
    CHECK(r.field("a2").max_abs() <= 1e-8);

    auto noisy = boundary_damping_data(s, [](double) { return 0.3; }, [](double) { return 0.3; }, 2);
    Xoshiro256 rng(5);
    add_noise(noisy, 1e-2, rng);
    o.lower = 0.05;
    o.misfit_tolerance = 0.0;
    CHECK_THROWS_WITH_AS(recover_boundary_damping(s.inversion, noisy, c, o),
                         doctest::Contains("iterate history"), NumericalError);
}
