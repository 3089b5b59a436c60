#pragma once

#include <cstddef>
#include <functional>

namespace gerbeflow {

// Worker count: GERBEFLOW_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_cap();

// Runs body(i) for i in [0, n) on up to thread_cap() threads. Each index runs
// exactly once; the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gerbeflow
