#pragma once

#include <stdexcept>

namespace cip {

/// Invalid configuration or input contract violation (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure during a run (CLI exit code 1).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cip
