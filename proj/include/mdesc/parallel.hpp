#pragma once

#include <cstddef>
#include <functional>

namespace mdesc {

/// Worker count used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, count). Each index is processed exactly once and
/// bodies must only write to per-index slots, so results never depend on the
/// worker count. Nested calls from inside a worker run inline.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace mdesc
