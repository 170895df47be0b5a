#include "vortex/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace vortex {

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : int(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("VORTEX_MAX_THREADS")) {
    try {
      const int limit = std::stoi(cap);
      if (limit > 0) n = std::min(n, limit);
    } catch (const std::exception&) {
      // unparsable cap: ignore
    }
  }
  return n;
}

}  // namespace vortex
