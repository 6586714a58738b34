#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "obslab/errors.hpp"
#include "obslab/volterra/volterra.hpp"
#include "oracles.hpp"

using namespace obslab;
using cd = std::complex<double>;

namespace {

Eigen::VectorXd sample(double dt, std::size_t n, double (*f)(double)) {
    Eigen::VectorXd v(n);
    for (std::size_t k = 0; k < n; ++k) v(k) = f(k * dt);
    return v;
}

double smooth_h(double t) { return 1.0 + std::sin(2.0 * t) + 0.3 * t * t; }

double rel_l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b, double dt) {
    return series_l2_norm(a - b, dt) / series_l2_norm(b, dt);
}

}  // namespace

TEST_CASE("convolution closed forms") {
    const double dt = 1e-3;
    const std::size_t n = step_count(1.0, dt);
    const Kernel one = Kernel::sample([](double) { return 1.0; }, dt, n);
    const Eigen::VectorXd y = convolve(one, Eigen::VectorXd(Eigen::VectorXd::Ones(n)));
    for (std::size_t k = 0; k < n; k += 100) CHECK(y(k) == doctest::Approx(k * dt).epsilon(1e-12));
    CHECK(y(0) == 0.0);
    const Kernel ex = Kernel::sample([](double t) { return std::exp(-t); }, dt, n);
    const Eigen::VectorXd z = convolve(ex, Eigen::VectorXd(Eigen::VectorXd::Ones(n)));
    for (std::size_t k = 0; k < n; k += 100) CHECK(std::abs(z(k) - (1 - std::exp(-static_cast<double>(k) * dt))) <= dt * dt);
    CHECK_THROWS_AS(convolve(Kernel::sample([](double) { return 1.0; }, dt, 10), Eigen::VectorXd::Ones(20).eval()), InputError);
}

TEST_CASE("convolution error drops by four when dt halves") {
    // Oracle: h = cos(2t) against lambda = e^{-t} has the closed-form
    // convolution (e^{-t}... ) evaluated here by fine Simpson quadrature.
    auto exact = [](double t) {
        return oracle::simpson([t](double s) { return std::exp(-(t - s)) * std::cos(2 * s); }, 0.0, t, 2000);
    };
    std::vector<double> errs;
    for (double dt : {0.02, 0.01, 0.005}) {
        const std::size_t n = step_count(1.0, dt);
        const Kernel ex = Kernel::sample([](double t) { return std::exp(-t); }, dt, n);
        Eigen::VectorXd h(n);
        for (std::size_t k = 0; k < n; ++k) h(k) = std::cos(2 * k * dt);
        errs.push_back(std::abs(convolve(ex, h)(n - 1) - exact(1.0)));
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.05));
    CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("deconvolution closed forms") {
    const double dt = 1e-3;
    const std::size_t n = step_count(1.0, dt);
    const Kernel one = Kernel::sample([](double) { return 1.0; }, dt, n);
    Eigen::VectorXd t(n);
    for (std::size_t k = 0; k < n; ++k) t(k) = k * dt;
    const Eigen::VectorXd h1 = deconvolve(one, t);
    CHECK((h1.array() - 1.0).abs().maxCoeff() <= 1e-10);
    const Kernel ex = Kernel::sample([](double s) { return std::exp(-s); }, dt, n);
    Eigen::VectorXd y(n);
    for (std::size_t k = 0; k < n; ++k) y(k) = 1 - std::exp(-static_cast<double>(k) * dt);
    CHECK((deconvolve(ex, y).array() - 1.0).abs().maxCoeff() <= 1e-3);
}

TEST_CASE("round trips on the kernel suite") {
    const double dt = 1e-3;
    const double tau = 1.0;
    const std::size_t n = step_count(tau, dt);
    std::vector<Kernel> kernels{
        Kernel::sample([](double) { return 1.0; }, dt, n),
        Kernel::sample([](double t) { return std::exp(-t); }, dt, n),
        Kernel::sample([](double t) { return std::cos(3 * t); }, dt, n),
        Kernel::sample_complex([](double t) { return std::exp(cd(0, t)); }, dt, n),
    };
    const Eigen::VectorXcd h = sample(dt, n, smooth_h).cast<cd>();
    for (const auto& k : kernels) {
        const Eigen::VectorXcd y = convolve(k, h);
        const Eigen::VectorXcd back = deconvolve(k, y);
        CHECK(rel_l2(back, h, dt) <= 1e-3);
        // Discrete Gronwall bound with kappa = 1.
        CHECK(series_l2_norm(back, dt) <= amplification_constant(k, tau, 1.0) * series_h1_norm(y, dt));
    }
}

TEST_CASE("round-trip order") {
    std::vector<double> hs, errs;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const std::size_t n = step_count(1.0, dt);
        const Kernel k = Kernel::sample([](double t) { return std::cos(3 * t); }, dt, n);
        const Eigen::VectorXd h = sample(dt, n, smooth_h);
        hs.push_back(dt);
        errs.push_back(series_l2_norm((deconvolve(k, convolve(k, h)) - h).cast<cd>(), dt));
    }
    CHECK(oracle::loglog_slope(hs, errs) >= 1.7);
}

TEST_CASE("kernel scaling and preconditions") {
    const double dt = 1e-2;
    const std::size_t n = 101;
    const Kernel k = Kernel::sample([](double t) { return std::cos(3 * t) + 0.2; }, dt, n);
    const Eigen::VectorXd y = convolve(k, sample(dt, n, smooth_h));
    for (double c : {2.0, -4.0, 0.5}) {
        const Eigen::VectorXd a = deconvolve(k.scaled(c), y);
        const Eigen::VectorXd b = deconvolve(k, y) / c;
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
    const Kernel zero0 = Kernel::sample([](double t) { return t; }, dt, n);
    CHECK_THROWS_AS(deconvolve(zero0, y), InputError);
    Eigen::VectorXd shifted = y;
    shifted(0) = 1e-3;
    CHECK_THROWS_AS(deconvolve(k, shifted), InputError);
}

TEST_CASE("trace columns match scalar runs") {
    const double dt = 1e-2;
    const std::size_t n = 101;
    const Kernel k = Kernel::sample([](double t) { return std::exp(-2 * t); }, dt, n);
    BoundaryTrace tr;
    tr.dt = dt;
    tr.nodes = {0, 10};
    tr.values.resize(n, 2);
    tr.values.col(0) = convolve(k, sample(dt, n, smooth_h));
    tr.values.col(1) = convolve(k, sample(dt, n, [](double t) { return std::cos(t); }));
    const BoundaryTrace out = deconvolve(k, tr);
    for (Eigen::Index c = 0; c < 2; ++c) {
        const Eigen::VectorXd col = deconvolve(k, Eigen::VectorXd(tr.values.col(c)));
        CHECK((out.values.col(c) - col).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("amplification constants") {
    const double dt = 1e-3;
    const Kernel one = Kernel::sample([](double) { return 1.0; }, dt, 3001);
    CHECK(amplification_constant(one, 2.0, 1.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(amplification_constant(one, 2.0, 2.0) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(dual_norm_amplification(one, 2.0, 1.7) == doctest::Approx(1.7));
    const double tau = 2.0;
    const Kernel ex = Kernel::sample([](double t) { return std::exp(-t); }, dt, 3001);
    CHECK(amplification_constant(ex, tau, 1.0) ==
          doctest::Approx(std::sqrt(2.0) * std::exp(tau * (1 - std::exp(-2 * tau)) / 2)).epsilon(1e-5));
    const double l00 = oracle::pi * oracle::pi / 2;
    const double w = std::sqrt(l00);
    const Kernel c = Kernel::sample([w](double t) { return std::cos(w * t); }, dt, 4001);
    const double norm_sq = l00 * (4.0 / 2 - std::sin(2 * w * 4.0) / (4 * w));
    CHECK(kernel_derivative_norm_sq(c, 4.0) == doctest::Approx(norm_sq).epsilon(1e-5));
    CHECK(dual_norm_amplification(c, 4.0) == doctest::Approx(std::exp(4.0 * norm_sq)).epsilon(1e-4));
    CHECK(dual_norm_amplification(c, 2.0) <= dual_norm_amplification(c, 4.0));
    CHECK_THROWS_AS(amplification_constant(one, 2.0, 0.0), InputError);
}

TEST_CASE("moving average keeps the ends") {
    Eigen::VectorXcd y(5);
    y << 0.0, 1.0, 2.0, 3.0, 10.0;
    const Eigen::VectorXcd s = moving_average(y, 3);
    CHECK(s(0).real() == 0.0);
    CHECK(s(2).real() == doctest::Approx(2.0));
    CHECK(s(4).real() == 10.0);
    CHECK_THROWS_AS(moving_average(y, 2), InputError);
}
