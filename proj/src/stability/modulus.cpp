#include "obslab/stability/modulus.hpp"

#include <cmath>
#include <sstream>

#include "obslab/errors.hpp"

namespace obslab {

StabilityModulus StabilityModulus::holder(double exponent) {
    require(exponent > 0.0 && exponent <= 1.0, "Holder exponent must lie in (0, 1]");
    return {Kind::Holder, exponent};
}

StabilityModulus StabilityModulus::log_power(double power) {
    require(power > 0.0 && std::isfinite(power), "log power must be positive");
    return {Kind::LogPower, power};
}

StabilityModulus StabilityModulus::phi(int n) {
    require(n >= 1, "dimension must be positive");
    return log_power(1.0 / (n + 3.0));
}

StabilityModulus StabilityModulus::psi() { return log_power(1.0); }

StabilityModulus StabilityModulus::theta(int n) {
    require(n >= 1, "dimension must be positive");
    return log_power(1.0 / (1.0 + 4.0 * n));
}

StabilityModulus StabilityModulus::half_log() { return log_power(0.5); }

std::string StabilityModulus::describe() const {
    std::ostringstream s;
    s.precision(17);
    if (kind == Kind::Holder) {
        s << "holder(" << parameter << ")";
    } else {
        s << "log_power(" << parameter << ")";
    }
    return s.str();
}

double modulus_domain_limit() { return std::exp(-1.0); }

double modulus_eval(const StabilityModulus& m, double rho) {
    if (!(rho >= 0.0 && rho <= modulus_domain_limit() * (1.0 + 1e-15))) {
        std::ostringstream s;
        s.precision(17);
        s << "modulus argument " << rho << " outside [0, 1/e]";
        throw InputError(s.str());
    }
    if (rho == 0.0) return 0.0;
    if (m.kind == StabilityModulus::Kind::Holder) return std::pow(rho, m.parameter);
    return std::pow(std::abs(std::log(rho)), -m.parameter) + rho;
}

double damping_holder_exponent(double delta) {
    require(delta > 0.0, "delta must be positive");
    return delta / (2.0 * (2.0 + delta));
}

}  // namespace obslab
