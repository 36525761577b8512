#pragma once

#include <cstddef>
#include <functional>

namespace pcnls {

/// Worker cap: NLS_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_budget();

/// Runs task(0), ..., task(count-1) on at most thread_budget() threads.
/// Tasks must be independent; the first exception thrown is rethrown after
/// every worker has finished.
void run_tasks(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace pcnls
