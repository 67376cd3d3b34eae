#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hputune {

/// Invalid argument or parameter outside the admissible domain.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Lookup outside a tabulated range (no extrapolation).
class RangeError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Quadrature failed to converge or the truncated tail is too heavy.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A fitted or derived model violates its own invariants.
class ValidityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The budget cannot pay one unit for every repetition.
class InsufficientBudget : public std::runtime_error {
public:
  InsufficientBudget(std::int64_t budget, std::int64_t required)
      : std::runtime_error("budget " + std::to_string(budget) +
                           " is not enough; at least " + std::to_string(required) +
                           " units are required"),
        budget_(budget), required_(required) {}

  std::int64_t budget() const noexcept { return budget_; }
  std::int64_t required() const noexcept { return required_; }

private:
  std::int64_t budget_;
  std::int64_t required_;
};

/// A probe recorded no events; the caller may extend the observation window.
class InsufficientData : public std::runtime_error {
public:
  explicit InsufficientData(double duration)
      : std::runtime_error("probe observed no events in " + std::to_string(duration) + " s"),
        duration_(duration) {}

  double duration() const noexcept { return duration_; }

private:
  double duration_;
};

/// Overall and on-hold probes cannot both hold under the chosen estimator.
class InconsistentProbe : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive search refused because the state space is too large.
class StateSpaceOverflow : public std::runtime_error {
public:
  StateSpaceOverflow(std::uint64_t states, std::uint64_t limit)
      : std::runtime_error("search space of " + std::to_string(states) +
                           (states > limit ? "+" : "") + " states exceeds limit " +
                           std::to_string(limit)),
        states_(states) {}

  /// Saturated count: any value above the limit means "at least this many".
  std::uint64_t states() const noexcept { return states_; }

private:
  std::uint64_t states_;
};

/// Malformed configuration or input file. Line is 0 when not applicable.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string source, std::size_t line, const std::string& message)
      : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " +
                           message),
        source_(std::move(source)), line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string source_;
  std::size_t line_;
};

}  // namespace hputune
