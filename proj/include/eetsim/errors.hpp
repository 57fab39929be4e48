#pragma once

#include <stdexcept>
#include <string>

namespace eetsim {

/// Malformed input data or configuration. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical invariant failed (non-PD correlation matrix, state drift). Exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace eetsim
