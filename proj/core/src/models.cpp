#include "ceamcl/models.hpp"

#include <cmath>
#include <stdexcept>

#include "ceamcl/perf.hpp"

namespace ceamcl {

std::vector<double> default_bearings(int count) {
  if (count <= 0) throw std::invalid_argument("default_bearings: count must be positive");
  std::vector<double> b(count);
  if (count == 1) {
    b[0] = 0.0;
    return b;
  }
  for (int i = 0; i < count; ++i)
    b[i] = wrap_angle(i * (2.0 * kPi / count));
  return b;
}

Pose sample_motion(const Pose& x_prev, const OdometryControl& u,
                   const NoiseParams& noise, Rng& rng) {
  perf().motion_draws++;
  double a_rot1 = std::abs(u.delta_rot1);
  double a_trans = std::abs(u.delta_trans);
  double a_rot2 = std::abs(u.delta_rot2);

  double std_rot1 = noise.alpha_rot * a_rot1 + noise.alpha_trans_rot * a_trans;
  double std_trans = noise.alpha_trans * a_trans + noise.alpha_trans_rot * (a_rot1 + a_rot2);
  double std_rot2 = noise.alpha_rot * a_rot2 + noise.alpha_trans_rot * a_trans;

  double rot1 = u.delta_rot1 + rng.gaussian() * std_rot1;
  double trans = u.delta_trans + rng.gaussian() * std_trans;
  double rot2 = u.delta_rot2 + rng.gaussian() * std_rot2;

  Pose out;
  out.x = x_prev.x + trans * std::cos(x_prev.theta + rot1);
  out.y = x_prev.y + trans * std::sin(x_prev.theta + rot1);
  out.theta = wrap_angle(x_prev.theta + rot1 + rot2);
  return out;
}

ScanObservation simulate_scan(const OccupancyGrid& map, const Pose& pose,
                              const std::vector<double>& bearings,
                              double max_range) {
  ScanObservation y;
  y.bearings = bearings;
  y.max_range = max_range;
  y.ranges.resize(bearings.size());
  for (std::size_t i = 0; i < bearings.size(); ++i)
    y.ranges[i] = raycast(map, pose, bearings[i], max_range);
  return y;
}

double likelihood(const ScanObservation& y, const Pose& x,
                  const OccupancyGrid& map, const NoiseParams& noise) {
  if (y.bearings.size() != y.ranges.size())
    throw std::invalid_argument("likelihood: bearings/ranges length mismatch");
  if (y.max_range <= 0.0)
    throw std::invalid_argument("likelihood: max_range must be positive");
  perf().likelihood_calls++;

  double floor_term = noise.z_rand / y.max_range;
  if (y.bearings.empty()) return 1.0;
  if (map.occupied_at(x.x, x.y)) return std::min(floor_term, 1.0);

  double inv_two_sigma_sq = 1.0 / (2.0 * noise.sigma_hit * noise.sigma_hit);
  double sum_log = 0.0;
  for (std::size_t i = 0; i < y.bearings.size(); ++i) {
    double expected = raycast(map, x, y.bearings[i], y.max_range);
    double d = y.ranges[i] - expected;
    double per_beam = noise.z_hit * std::exp(-d * d * inv_two_sigma_sq) + floor_term;
    sum_log += std::log(per_beam);
  }
  double value = std::exp(sum_log / static_cast<double>(y.bearings.size()));
  return std::min(value, 1.0);
}

}  // namespace ceamcl
