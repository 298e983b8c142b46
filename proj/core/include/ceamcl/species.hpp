#pragma once

#include <vector>

#include "ceamcl/coevolution.hpp"
#include "ceamcl/filter_core.hpp"
#include "ceamcl/models.hpp"
#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

struct Species {
  int id = 0;
  SampleSet samples;
  double population = 0.0;        // real-valued; materialized as round(population)
  double growth_rate_cached = 0.0;
  double fitness = 1.0;           // mean raw importance weight, in (0, 1]
  LivingDomain domain;
  double capacity = 0.0;
};

// Uniform clustering grid over the (x, y) subspace of a map.
struct GridSpec {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0;
  double cell_w = 0.0, cell_h = 0.0;

  static GridSpec over_map(const OccupancyGrid& map, int nx, int ny);
  int cell_count() const { return nx * ny; }
  // Clamped to the grid, so edge poses land in the border cells.
  int cell_of(double x, double y) const;
};

struct GridPartition {
  GridSpec spec;
  std::vector<double> avg_weight;  // per grid cell; empty cells hold 0
  std::vector<std::uint8_t> in_v;  // above-threshold set V
  std::vector<int> zone;           // influence zone per cell, -1 until skiz runs
  int zone_count = 0;
  double threshold = 0.0;
};

// n_test poses uniform over free space x [-pi, pi), weighted by the
// observation likelihood.
SampleSet draw_test_set(const OccupancyGrid& map, const ScanObservation& y0,
                        int n_test, const NoiseParams& noise, Rng& rng);

// Per-grid average weights; V = grids whose average exceeds
// mu * (max grid average).
GridPartition threshold_grids(const SampleSet& test, const GridSpec& spec,
                              double mu);

// N_0 = ceil(eta * |V| / mean weight of V). Throws if V is empty.
int initial_sample_size(const GridPartition& part, double eta);

// Labels connected regions of V (4-connectivity, row-major discovery) and
// grows them into influence zones by multi-source BFS under city-block
// distance; distance ties go to the lowest zone id.
GridPartition skiz_partition(GridPartition part);

// Zone quotas by largest-remainder on n0 * w(k) / sum w, then the top-quota
// test samples by weight from each zone become that zone's species.
std::vector<Species> allocate_and_select(const GridPartition& part,
                                         const SampleSet& test, int n0);

// Split species whose occupied grid cells form several connected components
// (fragments take fresh ids from next_id); components with fewer than
// min_fragment samples are folded into the nearest viable one instead of
// standing alone. Merge pairs whose domains overlap unless the weight valley
// between their means is deeper than half the smaller fitness. Fitness and
// domains are refreshed from current samples.
std::vector<Species> split_merge(std::vector<Species> list, const GridSpec& spec,
                                 int& next_id, int min_fragment = 1);

}  // namespace ceamcl
