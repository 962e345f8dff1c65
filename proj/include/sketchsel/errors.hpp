#pragma once

#include <stdexcept>
#include <string>

namespace sketchsel {

// Invalid input from the caller or from a file: bad dimensions, malformed
// CSV/JSON, violated preconditions. Maps to CLI exit code 1.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside an otherwise valid computation: non-positive
// Cholesky pivot, eigensolver non-convergence, inconsistent objective value.
// Maps to CLI exit code 2.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sketchsel
