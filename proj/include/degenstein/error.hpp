#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degenstein {

/// Failure categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  domain = 10,       // argument outside the operation's domain
  divergence = 11,   // quadrature failed to converge
  assumption = 12,   // structural assumption violated (e.g. F' <= 0)
  degenerate = 13,   // table unusable for the requested diagnostic
  cfl = 14,          // time step above the explicit stability bound
  range = 15,        // solution left its admissible band
  geometry = 16,     // cutoff ball does not fit in the grid
  resolution = 17,   // jump kernel narrower than a grid cell
  step = 18,         // kinetic step longer than the shortest waiting time
  negativity = 19,   // kinetic redistribution produced u < 0
  config = 20,       // malformed experiment configuration
  io = 21,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace degenstein
