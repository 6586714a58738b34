#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "obslab/errors.hpp"
#include "obslab/stability/modulus.hpp"
#include "obslab/stability/sweep.hpp"

using namespace obslab;

namespace {

std::vector<SweepRecord> synthetic(double (*law)(double)) {
    std::vector<SweepRecord> rows;
    for (double d : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2}) {
        SweepRecord r;
        r.distance = d;
        r.error = law(d);
        rows.push_back(r);
    }
    return rows;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("modulus substitutions") {
    const double e1 = std::exp(-1.0);
    CHECK(modulus_eval(StabilityModulus::psi(), e1) == doctest::Approx(1.0 + e1).epsilon(1e-14));
    const double r = std::exp(-32.0);
    CHECK(modulus_eval(StabilityModulus::phi(2), r) == doctest::Approx(0.5 + r).epsilon(1e-14));
    CHECK(modulus_eval(StabilityModulus::holder(0.1), 1e-5) ==
          doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-14));
    CHECK(damping_holder_exponent(0.5) == doctest::Approx(0.1));
    CHECK(StabilityModulus::theta(1).parameter == doctest::Approx(0.2));
    CHECK(StabilityModulus::half_log().parameter == 0.5);
    CHECK(modulus_eval(StabilityModulus::theta(1), 0.0) == 0.0);
    CHECK_THROWS_AS(modulus_eval(StabilityModulus::psi(), 0.5), InputError);
    CHECK_THROWS_AS(modulus_eval(StabilityModulus::psi(), -1e-3), InputError);
    CHECK_THROWS_AS(StabilityModulus::holder(1.5), InputError);
    CHECK_THROWS_AS(StabilityModulus::log_power(0.0), InputError);
}

TEST_CASE("moduli increase on the domain lattice") {
    const std::vector<StabilityModulus> all{
        StabilityModulus::phi(1), StabilityModulus::phi(2), StabilityModulus::psi(),
        StabilityModulus::theta(1), StabilityModulus::theta(2), StabilityModulus::half_log(),
        StabilityModulus::holder(0.1), StabilityModulus::holder(0.5), StabilityModulus::holder(1.0)};
    const double top = modulus_domain_limit();
    for (const auto& m : all) {
        CAPTURE(m.describe());
        double prev = modulus_eval(m, 0.0);
        for (int k = 1; k <= 1000; ++k) {
            const double v = modulus_eval(m, top * k / 1000.0);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("rate fit recovers planted laws") {
    const auto h = rate_fit(synthetic([](double d) { return std::sqrt(d); }), StabilityModulus::Kind::Holder);
    CHECK(h.parameter == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(h.residual < 1e-10);
    CHECK(!h.low_confidence);
    const auto l = rate_fit(synthetic([](double d) { return 1.0 / std::abs(std::log(d)); }),
                            StabilityModulus::Kind::LogPower);
    CHECK(l.parameter == doctest::Approx(1.0).epsilon(1e-3));
    const auto t = rate_fit(synthetic([](double d) { return 3.0 * std::pow(d, 0.1); }),
                            StabilityModulus::Kind::Holder);
    CHECK(t.parameter == doctest::Approx(0.1).epsilon(1e-6));

    std::vector<SweepRecord> narrow(3);
    for (int k = 0; k < 3; ++k) {
        narrow[k].distance = 0.1 + 0.1 * k;
        narrow[k].error = narrow[k].distance;
    }
    CHECK(rate_fit(narrow, StabilityModulus::Kind::Holder).low_confidence);
    narrow.pop_back();
    CHECK_THROWS_AS(rate_fit(narrow, StabilityModulus::Kind::Holder), InputError);
}

TEST_CASE("certify constants") {
    std::vector<SweepRecord> rows = synthetic([](double d) { return 2.0 * std::sqrt(d); });
    const auto c = certify(rows, StabilityModulus::holder(0.5));
    CHECK(c.pass);
    CHECK(c.constant == doctest::Approx(2.0));
    for (auto& r : rows) r.error *= 2.0;
    CHECK(certify(rows, StabilityModulus::holder(0.5)).constant == 2.0 * c.constant);

    for (auto& r : rows) r.error = 0.0;
    rows.front().distance = 0.0;
    const auto z = certify(rows, StabilityModulus::theta(1));
    CHECK(z.constant == 0.0);
    CHECK(z.pass);

    rows.front().error = 1e-3;
    CHECK(!certify(rows, StabilityModulus::theta(1)).pass);

    std::vector<SweepRecord> far(1);
    far[0].distance = 5.0;
    far[0].error = 1.0;
    const auto f = certify(far, StabilityModulus::holder(1.0));
    CHECK(f.clamped == 1);
    CHECK(f.constant == doctest::Approx(std::exp(1.0)));
    far[0].ok = false;
    CHECK(!certify(far, StabilityModulus::holder(1.0)).pass);
}

TEST_CASE("sweep spec validation") {
    SweepSpec s = default_sweep("potential-heat");
    CHECK_NOTHROW(s.validate());
    s.amplitudes = {0.1, 0.2};
    CHECK_THROWS_AS(s.validate(), InputError);
    s.amplitudes = {0.1};
    s.family = "damping";
    CHECK_THROWS_AS(s.validate(), InputError);
    CHECK_THROWS_AS(default_sweep("nope"), InputError);
    CHECK(sweep_pipelines().size() == 3);
}

TEST_CASE("boundary damping sweep") {
    SweepSpec s = default_sweep("boundary-damping");
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CAPTURE(k);
        REQUIRE(rows[k].ok);
        if (k > 0) CHECK(rows[k].distance < rows[k - 1].distance);
        CHECK(rows[k].error <= 0.05 * rows[k].perturbation);
    }
    const auto cert = certify(rows, StabilityModulus::holder(damping_holder_exponent(s.damping.delta)));
    CHECK(cert.pass);
}

TEST_CASE("potential sweeps certify against their moduli") {
    SweepSpec heat = default_sweep("potential-heat");
    heat.amplitudes = {0.3, 0.1, 0.03, 0.0};
    heat.recovery.probes = 3;
    const auto rows = run_sweep(heat, 2);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) REQUIRE(r.ok);
    CHECK(rows.back().distance == 0.0);
    CHECK(rows.back().error == 0.0);
    CHECK(certify(rows, StabilityModulus::theta(1)).pass);

    SweepSpec wave = default_sweep("potential-damping-wave");
    const auto w = run_sweep(wave);
    for (const auto& r : w) REQUIRE(r.ok);
    CHECK(certify(w, StabilityModulus::holder(0.5)).pass);
}

TEST_CASE("sweeps are deterministic per seed") {
    SweepSpec s = default_sweep("potential-damping-wave");
    s.amplitudes = {0.2, 0.1};
    s.noise = 1e-4;
    s.seeds = {3, 4};
    const auto a = run_sweep(s, 1);
    const auto b = run_sweep(s, 2);
    REQUIRE(a.size() == 4);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].seed == b[k].seed);
        CHECK(same_bits(a[k].distance, b[k].distance));
        CHECK(same_bits(a[k].error, b[k].error));
    }
    CHECK(!same_bits(a[0].error, a[1].error));
}
