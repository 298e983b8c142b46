#include "ceamcl/filter_core.hpp"

#include <cmath>
#include <stdexcept>

#include "ceamcl/perf.hpp"

namespace ceamcl {

double SampleSet::total_weight() const {
  double sum = 0.0;
  for (const auto& s : samples) sum += s.weight;
  return sum;
}

double SampleSet::mean_weight() const {
  return samples.empty() ? 0.0 : total_weight() / static_cast<double>(samples.size());
}

SampleSet normalize(SampleSet set) {
  double sum = set.total_weight();
  if (!(sum > 0.0)) throw std::runtime_error("normalize: total weight is zero");
  for (auto& s : set.samples) s.weight /= sum;
  return set;
}

SampleSet resample(const SampleSet& set, int n_out, Rng& rng) {
  if (set.empty()) throw std::invalid_argument("resample: empty sample set");
  if (n_out <= 0) throw std::invalid_argument("resample: n_out must be positive");
  double total = set.total_weight();
  if (!(total > 0.0)) throw std::runtime_error("resample: total weight is zero");
  perf().resampled_samples += static_cast<std::uint64_t>(n_out);

  SampleSet out;
  out.samples.reserve(n_out);
  double step = total / n_out;
  double pointer = rng.uniform() * step;
  double cumulative = set.samples[0].weight;
  std::size_t i = 0;
  double w_out = 1.0 / n_out;
  for (int k = 0; k < n_out; ++k) {
    while (pointer > cumulative && i + 1 < set.samples.size())
      cumulative += set.samples[++i].weight;
    out.samples.push_back({set.samples[i].pose, w_out});
    pointer += step;
  }
  return out;
}

SampleSet importance_step(const SampleSet& set, const OdometryControl& u,
                          const ScanObservation& y, const OccupancyGrid& map,
                          const NoiseParams& noise, Rng& rng) {
  SampleSet out;
  out.samples.resize(set.samples.size());
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    Rng child = rng.fork(i);
    out.samples[i].pose = sample_motion(set.samples[i].pose, u, noise, child);
    out.samples[i].weight = likelihood(y, out.samples[i].pose, map, noise);
  }
  return out;
}

PoseSummary summarize(const SampleSet& set) {
  if (set.empty()) throw std::invalid_argument("summarize: empty sample set");
  double total = set.total_weight();
  if (!(total > 0.0)) throw std::runtime_error("summarize: total weight is zero");

  PoseSummary out;
  double sx = 0.0, sy = 0.0, sc = 0.0, ss = 0.0;
  for (const auto& s : set.samples) {
    double w = s.weight / total;
    sx += w * s.pose.x;
    sy += w * s.pose.y;
    sc += w * std::cos(s.pose.theta);
    ss += w * std::sin(s.pose.theta);
  }
  out.mean.x = sx;
  out.mean.y = sy;
  out.mean.theta = wrap_angle(std::atan2(ss, sc));

  for (const auto& s : set.samples) {
    double w = s.weight / total;
    double d[3] = {s.pose.x - out.mean.x, s.pose.y - out.mean.y,
                   wrap_angle(s.pose.theta - out.mean.theta)};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out.covariance[r * 3 + c] += w * d[r] * d[c];
  }
  return out;
}

}  // namespace ceamcl
