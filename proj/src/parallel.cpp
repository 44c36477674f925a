#include "degenstein/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace degenstein {

int thread_limit() {
  static const int limit = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("DEGENSTEIN_THREADS")) {
      try {
        const int requested = std::stoi(env);
        if (requested > 0) n = requested;
      } catch (const std::exception&) {
        // ignore malformed values, keep the runtime default
      }
    }
    omp_set_num_threads(n);
    return n;
  }();
  return limit;
}

}  // namespace degenstein
