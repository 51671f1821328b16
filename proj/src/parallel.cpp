#include "bntune/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace bntune {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BN_TUNE_THREADS")) {
    try {
      const int value = std::stoi(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
      // fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

bool in_parallel_region() { return omp_in_parallel() != 0; }

}  // namespace bntune
