#pragma once

#include <cstdint>

namespace ceamcl {

// Operation counters for cost model fitting. Incremented by the hot paths;
// cheap enough to leave on.
struct PerfCounters {
  std::uint64_t likelihood_calls = 0;
  std::uint64_t motion_draws = 0;
  std::uint64_t resampled_samples = 0;
  double split_merge_seconds = 0.0;

  void reset() { *this = PerfCounters{}; }
};

PerfCounters& perf();

}  // namespace ceamcl
