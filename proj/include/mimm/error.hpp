#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

namespace mimm {

enum class ErrorKind {
  shape,
  insufficient_data,
  boundary_violation,
  degenerate_scale,
  validation,
  stationarity,
  parameter_domain,
  contract,
  budget_exceeded,
  io,
  no_solution_found,
  ill_conditioned,
  unbounded_likelihood,
  internal,
  timeout,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every library failure is reported as an Error carrying a kind, so the CLI
/// can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

/// Cooperative wall-clock limit checked from inside long-running loops.
class Deadline {
 public:
  using clock = std::chrono::steady_clock;

  Deadline() = default;
  static Deadline after(double seconds);
  static Deadline none() { return {}; }

  bool active() const noexcept { return at_.has_value(); }
  bool expired() const noexcept { return at_ && clock::now() >= *at_; }
  void check(const char* where) const;

 private:
  std::optional<clock::time_point> at_;
};

}  // namespace mimm
