#pragma once

#include <stdexcept>
#include <string>

namespace cbi {

/// Raised when an input violates a documented precondition (bad parameters,
/// malformed measure, wrong branching regime for the requested operation).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical method fails to reach its tolerance: step-size
/// underflow, non-convergent inversion, missing root bracket.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* what) {
    if (!cond) throw ValidationError(what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ValidationError(what);
}

}  // namespace detail
}  // namespace cbi
