#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace gyrolev {

/// Runs body(i) for i in [0, count) on up to `jobs` threads (0 = hardware
/// concurrency). Callers write results into slots indexed by i, so output
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& body);

/// Counter-based seed derivation (splitmix64 finalizer over the inputs).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace gyrolev
