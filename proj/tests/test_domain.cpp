#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "obslab/domain/norms.hpp"
#include "obslab/domain/operators.hpp"
#include "obslab/domain/series.hpp"
#include "obslab/domain/spectral.hpp"
#include "obslab/errors.hpp"
#include "oracles.hpp"

using namespace obslab;
using oracle::pi;

namespace {
// Frozen from the shooting oracles below (RK4, 4000 steps) and cross-checked
// against an adaptive ODE solver.
constexpr double kLambda1PotentialX = 10.368507161836334;
constexpr double kDampedRootRe = -0.2502747253392495;
constexpr double kDampedRootIm = 3.1333385568630687;

Field sine_mode(const Grid& g, int k) {
    return Field::sample(g, [k](double x, double) { return std::sqrt(2.0) * std::sin(k * pi * x); });
}
}  // namespace

TEST_CASE("grid geometry and labels") {
    const Grid g = Grid::square(5);
    CHECK(g.size() == 25);
    CHECK(g.hx() == doctest::Approx(0.25));
    CHECK(g.boundary_nodes(BoundaryLabel::All).size() == 16);
    const auto g0 = g.boundary_nodes(BoundaryLabel::Gamma0);
    const auto g1 = g.boundary_nodes(BoundaryLabel::Gamma1);
    CHECK(g0.size() + g1.size() == 16);
    CHECK(g1.front() == g.index(0, 0));
    CHECK(g.distance_to_boundary(g.index(2, 1)) == doctest::Approx(0.25));
    CHECK_THROWS_AS(Grid::interval(2), InputError);
    CHECK(parse_boundary_label("gamma1") == BoundaryLabel::Gamma1);
    CHECK_THROWS_AS(parse_boundary_label("middle"), InputError);
    double total = 0.0;
    for (double w : g.quadrature_weights()) total += w;
    CHECK(total == doctest::Approx(1.0));
    double perimeter = 0.0;
    for (double w : g.boundary_weights(BoundaryLabel::Gamma1)) perimeter += w;
    // The far ends of both Gamma1 edges belong to Gamma0.
    CHECK(perimeter == doctest::Approx(2.0 - g.hx()));
    double all = 0.0;
    for (double w : g.boundary_weights(BoundaryLabel::All)) all += w;
    CHECK(all == doctest::Approx(4.0));
}

TEST_CASE("field restriction and interpolation") {
    const Grid fine = Grid::interval(21);
    const Grid coarse = Grid::interval(11);
    const Field f = Field::sample(fine, [](double x, double) { return x * x; });
    const Field r = f.restrict_to(coarse);
    CHECK(r.values[5] == doctest::Approx(0.25));
    CHECK(f.interpolate(0.525) == doctest::Approx(0.5 * (0.25 + 0.3025)));
    CHECK_THROWS_AS(f.restrict_to(Grid::interval(8)), InputError);
}

TEST_CASE("discrete norms") {
    for (std::size_t n : {101u, 401u}) {
        const Grid g = Grid::interval(n);
        const double h = g.hx();
        CHECK(std::abs(norm(sine_mode(g, 1), NormKind::L2) - 1.0) <= 2 * h * h);
        // Oracle: Simpson quadrature of (1 - 2x)^2.
        const double exact = std::sqrt(oracle::simpson([](double x) { return (1 - 2 * x) * (1 - 2 * x); }, 0, 1, 200));
        CHECK(exact == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
        const Field p = Field::sample(g, [](double x, double) { return x * (1 - x); });
        CHECK(std::abs(norm(p, NormKind::H10) - exact) <= 2 * h * h);
    }
    const Grid g = Grid::square(9);
    for (auto kind : {NormKind::L2, NormKind::H10, NormKind::H2, NormKind::V, NormKind::DualV}) {
        CHECK(norm(Field::zeros(g), kind) == 0.0);
    }
    CHECK_THROWS_AS(norm(Field::constant(Grid::interval(3), 1.0), NormKind::H2), InputError);
    CHECK_THROWS_AS(parse_norm_kind("H3"), InputError);
}

TEST_CASE("dual V norm matches the Riesz representer") {
    // f = 1 on (0,1): representer r = x(1-x)/2, ||r'||^2 = 1/12.
    const Grid g = Grid::interval(201);
    CHECK(norm(Field::constant(g, 1.0), NormKind::DualV) ==
          doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-4));
    // On the square the V-dual norm of phi_kl is lambda_kl^{-1/2}.
    const Grid s = Grid::square(81);
    const auto mode = mixed_square_eigenpairs(s, 0, 0);
    CHECK(norm(mode.function, NormKind::DualV) ==
          doctest::Approx(1.0 / std::sqrt(mode.eigenvalue)).epsilon(2e-3));
    CHECK(norm(mode.function, NormKind::V) ==
          doctest::Approx(std::sqrt(mode.eigenvalue)).epsilon(2e-3));
}

TEST_CASE("Dirichlet eigenpairs") {
    const Grid g = Grid::interval(201);
    const double h = g.hx();
    const auto basis = dirichlet_eigenpairs(g, Field::zeros(g), 6);
    CHECK(std::abs(basis.values[0] - pi * pi) <= pi * pi * h * h);
    const Field diff = basis.functions[0] - sine_mode(g, 1);
    CHECK(norm(diff, NormKind::L2) <= 1e-3);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            CHECK(std::abs(inner(basis.functions[i], basis.functions[j]) - (i == j ? 1.0 : 0.0)) <= 1e-8);
        }
    }
    SUBCASE("constant shift") {
        const auto shifted = dirichlet_eigenpairs(g, Field::constant(g, 3.0), 6);
        for (std::size_t k = 0; k < 6; ++k) {
            CHECK(std::abs(shifted.values[k] - basis.values[k] - 3.0) <= 1e-9);
            CHECK(std::abs(shifted.values[k] - (std::pow((k + 1) * pi, 2) + 3.0)) <= 0.01 * (k + 1) * (k + 1));
        }
    }
    SUBCASE("Weyl-type bracket") {
        const double bound = 2.0;
        const Field q = Field::sample(g, [](double x, double) { return 2.0 * std::sin(7 * x); });
        const auto b = dirichlet_eigenpairs(g, q, 20);
        const double beta = pi * pi + bound + 1.0;
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double kk = static_cast<double>((k + 1) * (k + 1));
            CHECK(b.values[k] >= kk / beta);
            CHECK(b.values[k] <= beta * kk);
            if (k > 0) CHECK(b.values[k] >= b.values[k - 1]);
        }
    }
    SUBCASE("sign convention") {
        for (const auto& phi : basis.functions) {
            for (std::size_t n = 1; n < phi.size(); ++n) {
                if (std::abs(phi.values[n]) > 1e-8) {
                    CHECK(phi.values[n] > 0.0);
                    break;
                }
            }
        }
    }
}

TEST_CASE("large square grids use the sparse eigensolver") {
    // 79^2 interior unknowns; closed form of the 5-point Laplacian spectrum.
    const Grid g = Grid::square(81);
    const double h = g.hx();
    std::vector<double> exact;
    for (int k = 1; k <= 6; ++k) {
        for (int l = 1; l <= 6; ++l) {
            const double a = std::sin(k * pi * h / 2), b = std::sin(l * pi * h / 2);
            exact.push_back(4.0 / (h * h) * (a * a + b * b));
        }
    }
    std::sort(exact.begin(), exact.end());
    const auto basis = dirichlet_eigenpairs(g, Field::zeros(g), 6);
    for (std::size_t k = 0; k < 6; ++k) CHECK(basis.values[k] == doctest::Approx(exact[k]).epsilon(1e-10));
    const auto shifted = dirichlet_eigenpairs(g, Field::constant(g, -30.0), 3);
    CHECK(shifted.values[0] == doctest::Approx(exact[0] - 30.0).epsilon(1e-10));
    const auto again = dirichlet_eigenpairs(g, Field::zeros(g), 6);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(again.values[k] == basis.values[k]);
        CHECK(again.functions[k].values == basis.functions[k].values);
    }
    CHECK(basis.functions[0].min() >= -1e-12);
}

TEST_CASE("eigenvalue convergence is second order") {
    std::vector<double> hs, errs;
    for (std::size_t n : {21u, 41u, 81u}) {
        const Grid g = Grid::interval(n);
        hs.push_back(g.hx());
        errs.push_back(std::abs(dirichlet_eigenpairs(g, Field::zeros(g), 1).values[0] - pi * pi));
    }
    CHECK(oracle::loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("potential q = x: golden first eigenvalue") {
    const double shot = oracle::dirichlet_eigenvalue([](double x) { return x; }, 9.0, 11.0);
    CHECK(shot == doctest::Approx(kLambda1PotentialX).epsilon(1e-10));
    auto lam = [](std::size_t n) {
        const Grid g = Grid::interval(n);
        const Field q = Field::sample(g, [](double x, double) { return x; });
        return dirichlet_eigenpairs(g, q, 1).values[0];
    };
    const double coarse = lam(1001);
    const double fine = lam(2001);
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    CHECK(std::abs(extrapolated - kLambda1PotentialX) <= 1e-7);
    CHECK(std::abs(fine - kLambda1PotentialX) <= 1e-5);
}

TEST_CASE("mixed square modes") {
    CHECK(mixed_square_eigenvalue(0, 0) == doctest::Approx(pi * pi / 2));
    CHECK(mixed_square_eigenvalue(1, 0) == doctest::Approx(5 * pi * pi / 2));
    for (std::size_t n : {21u, 41u}) {
        const Grid g = Grid::square(n);
        const double h = g.hx();
        const auto m = mixed_square_eigenpairs(g, 0, 0);
        CHECK(std::abs(inner(m.function, m.function) - 1.0) <= 4 * h * h);
        // Zero on Gamma0.
        for (auto node : g.boundary_nodes(BoundaryLabel::Gamma0)) CHECK(m.function.values[node] == 0.0);
    }
    CHECK_THROWS_AS(mixed_square_eigenvalue(-1, 0), InputError);
}

TEST_CASE("damped quadratic eigenpairs") {
    const Grid g = Grid::interval(101);
    const double h = g.hx();
    SUBCASE("undamped") {
        const auto pairs = damped_quadratic_eigenpairs(g, Field::zeros(g), Field::zeros(g), 4);
        CHECK(std::abs(pairs[0].mu.real()) <= 1e-8);
        CHECK(std::abs(std::abs(pairs[0].mu.imag()) - pi) <= pi * h * h);
        CHECK(std::abs(std::abs(pairs[2].mu.imag()) - 2 * pi) <= 4 * pi * h * h);
        for (const auto& p : pairs) CHECK(p.residual <= 1e-6);
    }
    SUBCASE("constant damping closed form") {
        const double alpha = 0.6;
        const auto lams = dirichlet_eigenpairs(g, Field::zeros(g), 2).values;
        const auto pairs = damped_quadratic_eigenpairs(g, Field::zeros(g), Field::constant(g, alpha), 4);
        for (std::size_t k = 0; k < 2; ++k) {
            const double im = std::sqrt(lams[k] - alpha * alpha / 4);
            CHECK(pairs[2 * k].mu.real() == doctest::Approx(-alpha / 2).epsilon(1e-8));
            CHECK(std::abs(pairs[2 * k].mu.imag()) == doctest::Approx(im).epsilon(1e-8));
            CHECK(pairs[2 * k].mu.imag() < 0.0);
        }
        // psi = mu phi
        const auto& p = pairs[0];
        for (std::size_t n = 0; n < g.size(); ++n) {
            const std::complex<double> phi(p.phi.re.values[n], p.phi.im.values[n]);
            const std::complex<double> psi(p.psi.re.values[n], p.psi.im.values[n]);
            CHECK(std::abs(psi - p.mu * phi) <= 1e-12);
        }
    }
    SUBCASE("a = x golden root") {
        auto a = [](double x) { return x; };
        const auto shot = oracle::damped_root(a, {-0.25, 3.1});
        CHECK(shot.real() == doctest::Approx(kDampedRootRe).epsilon(1e-9));
        CHECK(shot.imag() == doctest::Approx(kDampedRootIm).epsilon(1e-9));
        auto root = [&](std::size_t n) {
            const Grid gg = Grid::interval(n);
            const auto pairs = damped_quadratic_eigenpairs(
                gg, Field::zeros(gg), Field::sample(gg, [](double x, double) { return x; }), 2);
            return pairs[1].mu;
        };
        const auto coarse = root(101);
        const auto fine = root(201);
        const auto extrapolated = (4.0 * fine - coarse) / 3.0;
        CHECK(std::abs(extrapolated - std::complex<double>(kDampedRootRe, kDampedRootIm)) <= 1e-6);
    }
}

TEST_CASE("series helpers") {
    CHECK(step_count(2.0, 0.1) == 21);
    CHECK(step_count(0.5, 1e-3) == 501);
    const Kernel k = Kernel::sample([](double t) { return t * t; }, 0.1, 11);
    CHECK(k.real_at(0.15) == doctest::Approx(0.5 * (0.01 + 0.04)));
    CHECK_THROWS_AS(Kernel(0.1, {1.0}), InputError);
    CHECK_THROWS_AS(Kernel(-0.1, {1.0, 2.0}), InputError);
    Eigen::VectorXd y(11);
    for (int n = 0; n < 11; ++n) y(n) = std::pow(0.1 * n, 2);
    const Eigen::VectorXd d = time_derivative(y, 0.1);
    for (int n = 0; n < 11; ++n) CHECK(d(n) == doctest::Approx(0.2 * n).epsilon(1e-10));
}
