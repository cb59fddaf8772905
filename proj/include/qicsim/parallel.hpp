#pragma once

#include <cstddef>
#include <functional>

namespace qicsim {

/// Worker count used when a call passes threads = 0. Initially the
/// hardware concurrency.
unsigned default_threads() noexcept;
void set_default_threads(unsigned n) noexcept;

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only its own output slot, so results do not depend on the
/// schedule. If any call throws, the exception from the lowest failing
/// index is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace qicsim
