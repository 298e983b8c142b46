#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ceamcl/models.hpp"
#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

using namespace ceamcl;

namespace {

OccupancyGrid small_map() { return build_symmetric_map(10.0, 1, 1.0, 0.1); }

}  // namespace

TEST_CASE("default bearings cover the full circle evenly") {
  auto b4 = default_bearings(4);
  REQUIRE(b4.size() == 4);
  CHECK(b4[0] == 0.0);
  CHECK(b4[1] == doctest::Approx(kPi / 2.0));
  CHECK(b4[2] == doctest::Approx(-kPi));
  CHECK(b4[3] == doctest::Approx(-kPi / 2.0));

  auto b1 = default_bearings(1);
  REQUIRE(b1.size() == 1);
  CHECK(b1[0] == 0.0);

  CHECK(default_bearings(64).size() == 64);
  CHECK_THROWS_AS(default_bearings(0), std::invalid_argument);
}

TEST_CASE("noiseless motion is an exact rigid displacement") {
  NoiseParams quiet;
  quiet.alpha_trans = quiet.alpha_rot = quiet.alpha_trans_rot = 0.0;
  Rng rng(1);

  Pose out = sample_motion({0, 0, 0}, {0.0, 1.0, 0.0}, quiet, rng);
  CHECK(out.x == 1.0);
  CHECK(out.y == 0.0);
  CHECK(out.theta == 0.0);

  // general control against the composed formula
  Pose x0{2.0, -1.0, 0.6};
  OdometryControl u{0.4, 1.7, -0.2};
  Pose got = sample_motion(x0, u, quiet, rng);
  CHECK(got.x == x0.x + u.delta_trans * std::cos(x0.theta + u.delta_rot1));
  CHECK(got.y == x0.y + u.delta_trans * std::sin(x0.theta + u.delta_rot1));
  CHECK(got.theta == wrap_angle(x0.theta + u.delta_rot1 + u.delta_rot2));
}

TEST_CASE("zero control reproduces the pose under any noise") {
  NoiseParams noise;
  noise.alpha_trans = 0.3;
  noise.alpha_rot = 0.3;
  Rng rng(2);
  Pose x0{1.0, 2.0, -0.4};
  for (int i = 0; i < 50; ++i) {
    Pose out = sample_motion(x0, {0, 0, 0}, noise, rng);
    CHECK(out.x == x0.x);
    CHECK(out.y == x0.y);
    CHECK(out.theta == x0.theta);
  }
}

TEST_CASE("motion noise scales with the commanded magnitudes") {
  const int n = 100000;

  // translation spread
  NoiseParams noise;
  noise.alpha_trans = 0.1;
  noise.alpha_rot = 0.0;
  noise.alpha_trans_rot = 0.0;
  Rng rng(3);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Pose out = sample_motion({0, 0, 0}, {0.0, 1.0, 0.0}, noise, rng);
    sum += out.x;
    sum2 += out.x * out.x;
  }
  double mean = sum / n;
  double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(mean == doctest::Approx(1.0).epsilon(0.005));
  CHECK(sd == doctest::Approx(0.1).epsilon(0.0).scale(1.0));
  CHECK(std::abs(sd - 0.1) < 0.01);

  // heading spread from the first rotation
  NoiseParams rot_noise;
  rot_noise.alpha_trans = 0.0;
  rot_noise.alpha_rot = 0.2;
  rot_noise.alpha_trans_rot = 0.0;
  Rng rng2(4);
  sum = sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Pose out = sample_motion({0, 0, 0}, {0.5, 0.0, 0.0}, rot_noise, rng2);
    sum += out.theta;
    sum2 += out.theta * out.theta;
  }
  mean = sum / n;
  sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.005));
  CHECK(std::abs(sd - 0.1) < 0.01);  // alpha_rot * |rot1|
}

TEST_CASE("one motion draw consumes exactly three gaussians") {
  NoiseParams noise;
  Rng a(9), b(9);
  sample_motion({1, 1, 0}, {0.1, 0.5, -0.1}, noise, a);
  b.gaussian();
  b.gaussian();
  b.gaussian();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("simulate_scan is raycast per bearing") {
  OccupancyGrid map = small_map();
  Pose p{3.0, 4.0, 0.5};
  auto bearings = default_bearings(8);
  ScanObservation y = simulate_scan(map, p, bearings, 6.0);
  REQUIRE(y.ranges.size() == 8);
  CHECK(y.max_range == 6.0);
  for (int i = 0; i < 8; ++i)
    CHECK(y.ranges[i] == raycast(map, p, bearings[i], 6.0));
}

TEST_CASE("a perfect scan scores the mixture peak") {
  OccupancyGrid map = small_map();
  NoiseParams noise;
  Pose p{5.0, 5.0, 0.3};
  ScanObservation y = simulate_scan(map, p, default_bearings(16), 8.0);
  double v = likelihood(y, p, map, noise);
  double peak = std::min(noise.z_hit + noise.z_rand / y.max_range, 1.0);
  CHECK(v == doctest::Approx(peak).epsilon(1e-12));
  CHECK(v <= 1.0);
}

TEST_CASE("a pose inside a wall gets the floor value") {
  OccupancyGrid map = small_map();
  NoiseParams noise;
  ScanObservation y = simulate_scan(map, {5.0, 5.0, 0.0}, default_bearings(16), 8.0);
  double v = likelihood(y, {0.05, 5.0, 0.0}, map, noise);
  CHECK(v == doctest::Approx(noise.z_rand / y.max_range).epsilon(1e-12));
  double off = likelihood(y, {-4.0, 5.0, 0.0}, map, noise);
  CHECK(off == doctest::Approx(noise.z_rand / y.max_range).epsilon(1e-12));
}

TEST_CASE("likelihood matches the per beam formula on a hand built case") {
  OccupancyGrid map = small_map();
  NoiseParams noise;
  noise.sigma_hit = 0.2;
  Pose p{4.0, 6.0, 0.0};
  std::vector<double> bearings = {0.0, kPi / 2.0};
  ScanObservation y = simulate_scan(map, p, bearings, 8.0);
  y.ranges[0] += 0.1;
  y.ranges[1] -= 0.25;

  double floor_term = noise.z_rand / y.max_range;
  double inv = 1.0 / (2.0 * noise.sigma_hit * noise.sigma_hit);
  double p0 = noise.z_hit * std::exp(-0.1 * 0.1 * inv) + floor_term;
  double p1 = noise.z_hit * std::exp(-0.25 * 0.25 * inv) + floor_term;
  CHECK(likelihood(y, p, map, noise) == doctest::Approx(std::sqrt(p0 * p1)).epsilon(1e-12));
}

TEST_CASE("likelihood drops away from the true pose") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  NoiseParams noise;
  noise.sigma_hit = 0.2;
  Pose truth{3.0, 3.0, 0.4};
  ScanObservation y = simulate_scan(map, truth, default_bearings(32), 4.0);
  double at_truth = likelihood(y, truth, map, noise);
  double off = likelihood(y, {truth.x + 0.5, truth.y, truth.theta}, map, noise);
  CHECK(off < at_truth);
}

TEST_CASE("likelihood stays in the unit interval and is pure") {
  OccupancyGrid map = small_map();
  NoiseParams noise;
  ScanObservation y = simulate_scan(map, {5.0, 5.0, 0.0}, default_bearings(8), 8.0);
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    Pose p{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0), rng.uniform(-kPi, kPi)};
    double v = likelihood(y, p, map, noise);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(likelihood(y, p, map, noise) == v);
  }
}

TEST_CASE("likelihood repeats exactly at the rotational twin pose") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  NoiseParams noise;
  Pose p{3.2, 2.6, 0.9};
  Pose q{7.5 - (p.y - 7.5), 7.5 + (p.x - 7.5), wrap_angle(p.theta + kPi / 2.0)};
  ScanObservation y = simulate_scan(map, p, default_bearings(32), 4.0);
  CHECK(likelihood(y, q, map, noise) ==
        doctest::Approx(likelihood(y, p, map, noise)).epsilon(1e-9));
}

TEST_CASE("likelihood rejects mismatched scan arrays") {
  OccupancyGrid map = small_map();
  NoiseParams noise;
  ScanObservation y;
  y.bearings = {0.0, 1.0};
  y.ranges = {2.0};
  y.max_range = 8.0;
  CHECK_THROWS_AS(likelihood(y, {5, 5, 0}, map, noise), std::invalid_argument);
}
