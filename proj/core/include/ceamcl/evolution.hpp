#pragma once

#include <array>
#include <utility>

#include "ceamcl/filter_core.hpp"
#include "ceamcl/models.hpp"
#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

struct EvolutionParams {
  double p_c = 0.85;  // crossover probability per trial
  double p_m = 0.15;  // mutation probability per trial
  std::array<double, 3> sigma_mut{0.1, 0.1, 0.05};  // mutation stds (x, y, theta)
};

// Convex blend of two poses at xi: children xi*a + (1-xi)*b and
// (1-xi)*a + xi*b, theta interpolated along the shorter arc.
std::pair<Pose, Pose> crossover_blend(const Pose& a, const Pose& b, double xi);

// Draw xi ~ U[0,1], blend, weight both children by likelihood, return the
// two best of {parents, children}. Ties prefer parents, then lower index.
std::pair<WeightedSample, WeightedSample> crossover(
    const WeightedSample& p1, const WeightedSample& p2,
    const ScanObservation& y, const OccupancyGrid& map,
    const NoiseParams& noise, Rng& rng);

// Gaussian pose perturbation; the child is weighted by likelihood at its own
// pose and survives only if strictly better than the parent.
WeightedSample mutate(const WeightedSample& p, const ScanObservation& y,
                      const OccupancyGrid& map, const NoiseParams& noise,
                      const EvolutionParams& params, Rng& rng);

// floor(n/2) crossover trials at p_c over distinct random pairs (survivors
// replace the pair in place), then n mutation trials at p_m on random
// samples. Every trial consumes its gate draw even when it does not fire,
// so the stream layout does not depend on p_c or p_m.
void evolve_samples(SampleSet& set, const ScanObservation& y,
                    const OccupancyGrid& map, const NoiseParams& noise,
                    const EvolutionParams& params, Rng& rng);

}  // namespace ceamcl
