#pragma once

#include <cstddef>
#include <functional>

namespace oam {

/// Thread count to use: `requested` if positive, else OAM_FORGE_THREADS if set
/// and positive, else 1.
int resolve_threads(int requested);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Work is handed
/// out by an atomic counter; callers must write results to per-index slots.
/// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace oam
