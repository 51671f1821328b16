#pragma once

#include <cstddef>

namespace bntune {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce bit-identical results.
enum class Execution { Serial, Parallel };

/// Threads to use for a parallel region: `requested` when > 0, otherwise the
/// BN_TUNE_THREADS environment variable when set to a positive value,
/// otherwise the OpenMP default.
int resolve_threads(int requested = 0);

/// True when called from inside an active OpenMP parallel region.
bool in_parallel_region();

}  // namespace bntune
