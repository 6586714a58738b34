#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obslab/recovery/boundary_damping.hpp"
#include "obslab/recovery/config.hpp"
#include "obslab/recovery/twin.hpp"
#include "obslab/stability/modulus.hpp"

namespace obslab {

/// One twin experiment of a sweep.
struct SweepRecord {
    double amplitude = 0.0;
    double distance = 0.0;      ///< operator-distance estimate over the probes
    double error = 0.0;         ///< L2 reconstruction error
    double perturbation = 0.0;  ///< L2 norm of the planted perturbation
    std::uint64_t seed = 0;
    std::string config;         ///< one-line echo of pipeline, family and setup
    bool ok = true;
    std::string message;        ///< failure text when !ok
};

/// Pipelines: "potential-heat" (families "phi1", "smooth"),
/// "potential-damping-wave" ("damping", "potential"),
/// "boundary-damping" ("constant", "linear").
struct SweepSpec {
    std::string pipeline = "potential-heat";
    std::string family = "phi1";
    std::vector<double> amplitudes;  ///< non-negative, strictly decreasing
    double noise = 0.0;
    std::vector<std::uint64_t> seeds{0};
    TwinSetup setup;
    RecoveryConfig recovery;
    DampingOptions damping;

    void validate() const;
};

/// Grids, horizon and probe counts known to resolve each pipeline.
SweepSpec default_sweep(const std::string& pipeline);

std::vector<std::string> sweep_pipelines();
std::vector<std::string> sweep_families(const std::string& pipeline);

/// Rows for every (amplitude, seed), run concurrently, in amplitude order then
/// seed order. A failing row is kept with ok = false.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, unsigned threads = 1);

struct RateFit {
    double parameter = 0.0;  ///< Holder exponent or log power
    double residual = 0.0;   ///< RMS residual of the log-log fit
    std::size_t used = 0;
    bool low_confidence = false;  ///< distances span less than one decade
};

/// Holder: slope of ln(error) against ln(distance). LogPower: minus the slope
/// of ln(error) against ln|ln(distance)|. Needs 3 rows with positive distance
/// and error.
RateFit rate_fit(const std::vector<SweepRecord>& records, StabilityModulus::Kind model);

struct Certificate {
    double constant = 0.0;  ///< max error / modulus(distance)
    bool pass = false;      ///< constant finite and at least one usable row
    std::size_t used = 0;
    std::size_t clamped = 0;  ///< rows whose distance was clamped to 1/e
    std::size_t skipped = 0;  ///< failed rows
    std::string modulus;
};

Certificate certify(const std::vector<SweepRecord>& records, const StabilityModulus& modulus);

}  // namespace obslab
