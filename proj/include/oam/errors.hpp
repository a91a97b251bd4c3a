#pragma once

#include <stdexcept>
#include <string>

namespace oam {

// Bad input: out-of-range parameters, mismatched grids, malformed files.
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to produce a finite, converged result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws ValidationError with `what` when `ok` is false.
inline void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

}  // namespace oam
