#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "obslab/errors.hpp"
#include "obslab/recovery/boundary_damping.hpp"
#include "obslab/recovery/config.hpp"
#include "obslab/recovery/twin.hpp"
#include "obslab/stability/sweep.hpp"

namespace obslab {

/// Flat key-value experiment description. Sections and keys are listed in
/// config_schema(); expressions follow the grammar of Expression.
struct ExperimentConfig {
    // [experiment]
    std::string problem = "wave";  ///< wave, heat or square
    std::uint64_t seed = 0;
    std::string output = "out";

    // [grid]
    int dimension = 1;
    std::size_t nodes = 51;
    std::size_t forward_nodes = 101;

    // [time]
    double tau = 1.0;
    double dt = 0.01;
    std::size_t time_ratio = 2;

    // [coefficients]
    std::string q = "0";
    std::string a = "0";
    std::string q_true = "0";
    std::string a_true = "0";
    std::string a1 = "0.5";  ///< bottom edge of the square, in x
    std::string a2 = "0.5";  ///< left edge of the square, in x
    std::string u0 = "phi1";
    std::string u1 = "0";
    std::string source = "";  ///< f(x, y); empty for none
    std::string g = "1";      ///< g(t)
    std::string kernel = "1";
    std::string kernel_im = "";
    std::string signal = "t";

    // [recovery]
    std::size_t probes = 10;
    std::size_t truncation = 0;
    double regularization = 1e-12;
    double epsilon = 1.0;
    double s = 1.0;
    double noise = 0.0;
    double theta = 0.1;
    std::size_t max_modes = 40;
    std::size_t smoothing_width = 1;
    std::size_t outer_iterations = 2;
    double condition_limit = 1e12;

    // [damping]
    double lower = 0.05;
    double upper = 10.0;
    double delta = 0.5;
    double holder_constant = 1.0;
    std::size_t control_points = 5;
    double initial = 0.25;
    std::size_t max_iterations = 40;
    double misfit_tolerance = 0.1;

    // [sweep]
    std::string pipeline = "potential-heat";
    std::string family = "phi1";
    std::vector<double> amplitudes{0.3, 0.1, 0.03, 0.01};
    std::vector<std::uint64_t> seeds{0};
    std::string modulus = "";  ///< empty: the designated modulus of the pipeline
    std::string input = "";    ///< sweep CSV for certify; empty reruns the sweep

    bool operator==(const ExperimentConfig&) const = default;

    RecoveryConfig recovery() const;
    DampingOptions damping() const;
    TwinSetup twin(unsigned threads = 1) const;
    Grid inversion_grid() const;
    Grid forward_grid() const;
    SweepSpec sweep() const;
    StabilityModulus sweep_modulus() const;
};

struct ConfigViolation {
    std::size_t line = 0;  ///< 0 when the key was not present in the text
    std::string key;       ///< section.key
    std::string constraint;
};

class ConfigError : public InputError {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations);
    std::vector<ConfigViolation> violations;
};

/// Parses and validates. Throws ConfigError listing every violation.
ExperimentConfig parse_config(const std::string& text);

/// Every key in schema order, doubles with 17 significant digits.
std::string serialize_config(const ExperimentConfig& config);

/// Violations of cross-field and range constraints (no parsing).
std::vector<ConfigViolation> validate_config(const ExperimentConfig& config);

/// Parses "holder:e", "log-power:p", "phi:n", "theta:n", "psi", "half-log".
StabilityModulus parse_modulus(const std::string& text);

struct ConfigKey {
    std::string section;
    std::string key;
    std::string help;
};
std::vector<ConfigKey> config_schema();

}  // namespace obslab
