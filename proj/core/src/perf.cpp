#include "ceamcl/perf.hpp"

namespace ceamcl {

PerfCounters& perf() {
  static PerfCounters counters;
  return counters;
}

}  // namespace ceamcl
