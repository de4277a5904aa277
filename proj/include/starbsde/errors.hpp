#pragma once

#include <stdexcept>
#include <string>

namespace starbsde {

/// Bad parameters, malformed configs, violated preconditions. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures at runtime (non-convergence, infinite values at visited
/// nodes, unstable sups). CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace starbsde
