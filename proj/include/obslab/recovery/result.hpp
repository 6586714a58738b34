#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "obslab/domain/field.hpp"

namespace obslab {

/// One retained spectral coefficient and the residual of the fit it came from.
struct ModeEstimate {
    std::size_t mode = 0;  ///< 1-based mode (or probe) index
    double coefficient = 0.0;
    double residual = 0.0;
};

struct RecoveryResult {
    std::vector<std::pair<std::string, Field>> fields;
    std::vector<ModeEstimate> modes;  ///< exactly l entries
    double bound = 0.0;               ///< certified error bound, >= 0
    std::string bound_note;
    std::map<std::string, double> diagnostics;
    std::map<std::string, std::vector<double>> series;
    std::vector<std::string> flags;

    const Field& field(std::string_view name) const;
    std::vector<double> coefficients() const;
};

}  // namespace obslab
