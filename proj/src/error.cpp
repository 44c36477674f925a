#include "degenstein/error.hpp"

namespace degenstein {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::assumption: return "assumption";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::cfl: return "cfl";
    case ErrorKind::range: return "range";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::step: return "step";
    case ErrorKind::negativity: return "negativity";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace degenstein
