#pragma once

#include <array>
#include <cstdint>

namespace obslab {

/// xoshiro256** seeded through splitmix64, so a u64 seed reproduces the same
/// stream in any implementation of the published generators.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);
    std::uint64_t next();
    /// Uniform on [0, 1) from the top 53 bits.
    double uniform();
    /// Standard normal by Box-Muller; the second variate is cached.
    double normal();

private:
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const void* data, std::size_t size);

}  // namespace obslab
