#include "nlac/parallel.hpp"

#include <cstdlib>
#include <string>

namespace nlac {

std::size_t default_worker_count() {
  if (const char* env = std::getenv("NLAC_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return std::size_t(v);
    } catch (...) {
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

}  // namespace nlac
