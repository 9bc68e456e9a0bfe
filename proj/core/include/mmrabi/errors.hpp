#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmrabi {

/// Invalid or inconsistent user-supplied parameters.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested problem size exceeds the configured memory / dimension budget.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative routine failed to reach its tolerance within its budget.
/// Carries the convergence trace (e.g. energy per batch) for diagnostics.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what, std::vector<double> trace = {})
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

/// Internal numerical precision fell below a required tolerance.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

/// Bond-dimension cap saturated while the requested truncation error could
/// not be met. Carries the partial measurement trace recorded so far.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, std::vector<double> times,
                  std::vector<double> values)
      : std::runtime_error(what),
        partial_times_(std::move(times)),
        partial_values_(std::move(values)) {}
  const std::vector<double>& partial_times() const noexcept { return partial_times_; }
  const std::vector<double>& partial_values() const noexcept { return partial_values_; }

 private:
  std::vector<double> partial_times_;
  std::vector<double> partial_values_;
};

}  // namespace mmrabi
