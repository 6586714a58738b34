#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace obslab {

struct RunOptions {
    std::string subcommand;
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;  ///< overrides experiment.output
    std::optional<std::uint64_t> seed;         ///< overrides experiment.seed
    unsigned threads = 1;
};

/// forward, deconvolve, invert-source, invert-potential, invert-damping,
/// verify-inequalities, stability-sweep, certify.
const std::vector<std::string>& subcommands();

/// Runs one subcommand and returns the exit status: 0 success, 1 input or
/// config error, 2 numerical failure. Errors go to `err`, a one-line summary
/// to `log`. Outputs of a failed run are removed.
int run(const RunOptions& options, std::ostream& log, std::ostream& err);

}  // namespace obslab
