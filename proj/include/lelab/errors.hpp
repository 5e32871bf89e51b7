#pragma once

#include <stdexcept>
#include <string>

namespace lelab {

/// Base for all library errors. The CLI maps the subclasses onto its
/// exit-code taxonomy (2 usage, 3 numeric failure, 4 missing artifact).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument, violated precondition, malformed config.
struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

/// Numerical failure: non-convergence, quadrature breakdown, degenerate input.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Missing or corrupt on-disk artifact.
struct ArtifactError : Error {
    explicit ArtifactError(const std::string& msg) : Error(msg) {}
};

}  // namespace lelab
