#pragma once

#include <stdexcept>
#include <string>

namespace obslab {

/// Invalid input: bad arguments, violated preconditions, malformed config.
/// The CLI maps this to exit status 1.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that was set up correctly but could not complete
/// (instability, solver breakdown, rank deficiency). Exit status 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InputError(message);
    }
}

}  // namespace obslab
