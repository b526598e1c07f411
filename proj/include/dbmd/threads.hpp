#pragma once

#include <functional>

namespace dbmd {

// Worker-thread budget: DBMD_THREADS when set (clamped to >= 1), otherwise
// the hardware concurrency.
int thread_cap();

// Runs fn(0) .. fn(count - 1), split over at most thread_cap() threads.
// Callers must write results to disjoint slots; outputs are then identical
// for every thread budget. The first exception thrown (lowest index) is
// rethrown on the calling thread.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace dbmd
