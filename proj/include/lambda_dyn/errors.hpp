// errors.hpp — Exception types shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace lambda_dyn {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its accuracy contract.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal invariant (pairing, Hermiticity, completeness) was violated.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed or out-of-range scenario configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lambda_dyn
