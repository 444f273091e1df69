#pragma once

#include <cstddef>
#include <functional>

namespace sausage_lab {

/// Worker count: `requested` if positive, else $SAUSAGE_LAB_WORKERS, else
/// the hardware concurrency. Never less than 1.
std::size_t resolve_workers(std::size_t requested = 0);

/// Runs body(i) for i in [0, n) on up to `workers` threads. Indices are
/// handed out dynamically; callers write results into per-index slots and
/// reduce afterwards so the outcome never depends on scheduling. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

}  // namespace sausage_lab
