#pragma once

#include <stdexcept>
#include <string>

namespace spinsplit {

// Error categories; the CLI maps each to a distinct exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;  // exit code 2
};

struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;  // exit code 3
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;  // exit code 4
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;  // exit code 5
};

}  // namespace spinsplit
