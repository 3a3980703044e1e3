#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace subriemann {

// Worker count used by the parallel loops; 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, count). Each index writes only its own output slot,
// so results do not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& body);

// Independent deterministic stream for (seed, index).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index);

}  // namespace subriemann
