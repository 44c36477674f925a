#pragma once

namespace degenstein {

/// Serial reference or OpenMP loop. Both run the same per-cell body and
/// produce bit-identical results.
enum class Exec { serial, parallel };

/// Thread cap: DEGENSTEIN_THREADS when set to a positive integer, else the
/// OpenMP default. Applied to the OpenMP runtime on first call.
int thread_limit();

}  // namespace degenstein
