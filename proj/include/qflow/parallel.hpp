#pragma once

#include <functional>

namespace qflow {

/// Worker cap: QFLOW_THREADS if set to a positive integer, else the
/// hardware concurrency. Read on every call.
int worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker,
/// so callers that write only to slot i get results independent of the
/// worker count. The first exception thrown by any body is rethrown.
void parallel_for(int n, const std::function<void(int)>& body, int min_items_per_worker = 1);

}  // namespace qflow
