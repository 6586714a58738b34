#pragma once

#include <string>

namespace obslab {

/// Stability modulus rho -> rho^e (Holder) or |ln rho|^-p + rho (LogPower),
/// defined on (0, 1/e] and extended by 0 at rho = 0.
struct StabilityModulus {
    enum class Kind { Holder, LogPower };
    Kind kind = Kind::Holder;
    double parameter = 1.0;  ///< exponent in (0, 1] or power > 0

    static StabilityModulus holder(double exponent);
    static StabilityModulus log_power(double power);
    /// Logarithmic moduli of the stability estimates in dimension n.
    static StabilityModulus phi(int n);    ///< power 1/(n+3)
    static StabilityModulus psi();         ///< power 1
    static StabilityModulus theta(int n);  ///< power 1/(1+4n)
    static StabilityModulus half_log();    ///< power 1/2

    std::string describe() const;
};

/// Largest admissible distance, 1/e.
double modulus_domain_limit();

/// Throws InputError for rho outside [0, 1/e]; returns 0 at rho = 0.
double modulus_eval(const StabilityModulus& modulus, double rho);

/// Exponent delta / (2 (2 + delta)) of the boundary-damping estimate.
double damping_holder_exponent(double delta);

}  // namespace obslab
