#pragma once

#include <stdexcept>
#include <string>

namespace lpvio {

/// Numerical failure: solver non-convergence, simulation overflow, indefinite inputs.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// File-level failure: missing files, malformed CSV/JSON, write errors.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lpvio
