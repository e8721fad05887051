#pragma once

#include <stdexcept>
#include <string>

namespace hakernel {

/// Base of every error raised by the library. The exit code is the one the
/// command-line front end reports for this category.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Invalid parameter or flag value (m, k, lambda, fold count, ...).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what, 2) {}
};

/// Malformed or inconsistent input data, including dimension mismatches.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what, 3) {}
};

/// Numerical failure: overflow, non-convergence, infeasible tuning cells.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what, 4) {}
};

}  // namespace hakernel
