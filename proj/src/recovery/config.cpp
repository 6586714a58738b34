#include "obslab/recovery/config.hpp"

#include <cmath>

#include "obslab/errors.hpp"

namespace obslab {

namespace {

std::size_t integer_part(double x) {
    require(std::isfinite(x) && x >= 0.0, "integer part of an invalid value");
    auto k = static_cast<std::size_t>(std::floor(x));
    while (static_cast<double>(k + 1) <= x) ++k;
    while (k > 0 && static_cast<double>(k) > x) --k;
    return k;
}

}  // namespace

void RecoveryConfig::validate() const {
    require(probes >= 1, "probe count K must be at least 1");
    require(epsilon >= 1.0, "epsilon must be >= 1");
    require(s >= 1.0, "s must be >= 1");
    require(noise_level >= 0.0, "noise level must be nonnegative");
    require(regularization > 0.0, "regularization weight must be positive");
    require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
    require(max_modes >= 1, "max_modes must be at least 1");
    require(smoothing_width % 2 == 1, "smoothing width must be odd");
    const auto l = retained_modes();
    require(l >= 1 && l <= probes, "truncation level must satisfy K >= l >= 1");
}

std::size_t RecoveryConfig::retained_modes() const {
    return truncation > 0 ? truncation : level_from_s(s);
}

std::size_t level_from_s(double s) {
    require(s >= 1.0, "s must be >= 1");
    return integer_part(s);
}

double epsilon_from_s(double s, int dimension) {
    require(s >= 1.0, "s must be >= 1");
    require(dimension == 1 || dimension == 2, "dimension must be 1 or 2");
    return std::pow(s, 3.0 / dimension + 1.0);
}

std::size_t heat_mode_count(double epsilon, int dimension) {
    require(epsilon >= 1.0, "epsilon must be >= 1");
    return integer_part(std::pow(epsilon, dimension / 2.0));
}

}  // namespace obslab
