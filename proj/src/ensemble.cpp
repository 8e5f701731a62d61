#include "rfbm/ensemble.hpp"

#include <cstdlib>
#include <string>

namespace rfbm {

namespace {
int g_workers = 0;
}

int worker_count() {
  if (g_workers > 0) return g_workers;
  if (const char* env = std::getenv("RFBM_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

void set_worker_count(int n) { g_workers = n > 0 ? n : 0; }

}  // namespace rfbm
