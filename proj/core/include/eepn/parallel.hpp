// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace eepn {

/// Worker count: `requested` if positive, else EEPN_LAB_THREADS, else the
/// hardware concurrency (at least 1).
int resolve_threads(int requested);

/// Runs job(i) for i in [0, count) on `threads` workers. Jobs are handed out
/// through a shared counter, so a slow job never stalls the others. Callers
/// write results into slot i; output order is independent of scheduling.
/// The first exception thrown by a job is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job);

template <class T, class F>
std::vector<T> parallel_map(std::size_t count, int threads, F&& fn) {
  std::vector<T> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace eepn
