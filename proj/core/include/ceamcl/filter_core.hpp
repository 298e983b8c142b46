#pragma once

#include <array>
#include <vector>

#include "ceamcl/models.hpp"
#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

struct WeightedSample {
  Pose pose;
  double weight = 0.0;
};

struct SampleSet {
  std::vector<WeightedSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
  bool empty() const { return samples.empty(); }
  double total_weight() const;
  double mean_weight() const;
};

// Scale weights to sum to 1. Throws on an all-zero set.
SampleSet normalize(SampleSet set);

// Systematic (low variance) resampling to n_out samples, each with weight
// 1/n_out. A single start draw places n_out evenly spaced pointers over the
// cumulative weights.
SampleSet resample(const SampleSet& set, int n_out, Rng& rng);

// Advance every sample through the motion model and replace its weight with
// the observation likelihood at the new pose. Weights are left raw
// (unnormalized); sample i uses the child stream rng.fork(i), forked in
// index order.
SampleSet importance_step(const SampleSet& set, const OdometryControl& u,
                          const ScanObservation& y, const OccupancyGrid& map,
                          const NoiseParams& noise, Rng& rng);

struct PoseSummary {
  Pose mean;
  std::array<double, 9> covariance{};  // row-major (x, y, theta)
};

// Weighted mean pose (theta via circular mean) and weighted covariance with
// angle deviations wrapped to [-pi, pi).
PoseSummary summarize(const SampleSet& set);

}  // namespace ceamcl
