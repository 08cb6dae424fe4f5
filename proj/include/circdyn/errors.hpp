#pragma once

#include <stdexcept>
#include <string>

namespace circdyn {

/// Malformed or out-of-contract input (bad file, violated precondition).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configured complexity cap (breakpoints, density pieces, family cells) was hit.
class ResourceExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A construction could not be certified (e.g. infeasible fineness, unverified report).
class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace circdyn
