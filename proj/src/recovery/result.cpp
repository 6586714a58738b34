#include "obslab/recovery/result.hpp"

#include "obslab/errors.hpp"

namespace obslab {

const Field& RecoveryResult::field(std::string_view name) const {
    for (const auto& [n, f] : fields) {
        if (n == name) return f;
    }
    throw InputError("recovery result has no field named " + std::string(name));
}

std::vector<double> RecoveryResult::coefficients() const {
    std::vector<double> out;
    out.reserve(modes.size());
    for (const auto& m : modes) out.push_back(m.coefficient);
    return out;
}

}  // namespace obslab
