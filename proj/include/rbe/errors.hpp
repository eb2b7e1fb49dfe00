#pragma once

#include <stdexcept>
#include <string>

namespace rbe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear system that must be solved exactly turned out to be singular.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure ran out of iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Learned weights became non-finite or exceeded the divergence threshold.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Writes a warning line to stderr unless warnings have been silenced.
void log_warning(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace rbe
