#ifndef LCM_PARALLEL_HPP
#define LCM_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace lcm {

// Worker count for parallel loops: LCM_IDENT_THREADS if set to a positive
// value, otherwise the hardware concurrency (clamped to [1, 8]). A value of
// 0 or an unset variable means "auto".
int worker_count();

/* Runs fn(0..count-1), possibly across threads. Iterations must be
 * independent; callers keep determinism by writing results into
 * pre-allocated per-index slots and merging by index afterwards. Exceptions
 * propagate: the first thrown (by lowest index) is rethrown. */
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace lcm

#endif
