#include "ceamcl/evolution.hpp"

#include <algorithm>
#include <stdexcept>

namespace ceamcl {

std::pair<Pose, Pose> crossover_blend(const Pose& a, const Pose& b, double xi) {
  double d = wrap_angle(a.theta - b.theta);
  Pose c1{xi * a.x + (1.0 - xi) * b.x, xi * a.y + (1.0 - xi) * b.y,
          wrap_angle(b.theta + xi * d)};
  Pose c2{(1.0 - xi) * a.x + xi * b.x, (1.0 - xi) * a.y + xi * b.y,
          wrap_angle(b.theta + (1.0 - xi) * d)};
  return {c1, c2};
}

std::pair<WeightedSample, WeightedSample> crossover(
    const WeightedSample& p1, const WeightedSample& p2,
    const ScanObservation& y, const OccupancyGrid& map,
    const NoiseParams& noise, Rng& rng) {
  double xi = rng.uniform();
  auto [c1_pose, c2_pose] = crossover_blend(p1.pose, p2.pose, xi);
  WeightedSample pool[4] = {p1, p2,
                            {c1_pose, likelihood(y, c1_pose, map, noise)},
                            {c2_pose, likelihood(y, c2_pose, map, noise)}};
  int order[4] = {0, 1, 2, 3};
  // stable on ties: parents (index 0, 1) outrank children, lower index first
  std::stable_sort(order, order + 4,
                   [&](int a, int b) { return pool[a].weight > pool[b].weight; });
  return {pool[order[0]], pool[order[1]]};
}

WeightedSample mutate(const WeightedSample& p, const ScanObservation& y,
                      const OccupancyGrid& map, const NoiseParams& noise,
                      const EvolutionParams& params, Rng& rng) {
  Pose c = p.pose;
  c.x += rng.gaussian() * params.sigma_mut[0];
  c.y += rng.gaussian() * params.sigma_mut[1];
  c.theta = wrap_angle(c.theta + rng.gaussian() * params.sigma_mut[2]);
  WeightedSample child{c, likelihood(y, c, map, noise)};
  return child.weight > p.weight ? child : p;
}

void evolve_samples(SampleSet& set, const ScanObservation& y,
                    const OccupancyGrid& map, const NoiseParams& noise,
                    const EvolutionParams& params, Rng& rng) {
  if (params.p_c < 0.0 || params.p_c > 1.0 || params.p_m < 0.0 || params.p_m > 1.0)
    throw std::invalid_argument("evolve_samples: probabilities must be in [0, 1]");
  int n = set.size();

  for (int k = 0; k < n / 2; ++k) {
    bool fire = rng.bernoulli(params.p_c);
    if (!fire || n < 2) continue;
    int i = rng.uniform_int(n);
    int j = rng.uniform_int(n - 1);
    if (j >= i) ++j;
    auto [a, b] = crossover(set.samples[i], set.samples[j], y, map, noise, rng);
    set.samples[i] = a;
    set.samples[j] = b;
  }
  for (int k = 0; k < n; ++k) {
    bool fire = rng.bernoulli(params.p_m);
    if (!fire) continue;
    int i = rng.uniform_int(n);
    set.samples[i] = mutate(set.samples[i], y, map, noise, params, rng);
  }
}

}  // namespace ceamcl
