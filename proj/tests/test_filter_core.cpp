#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "ceamcl/filter_core.hpp"
#include "ceamcl/models.hpp"
#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

using namespace ceamcl;

namespace {

SampleSet make_set(std::initializer_list<double> weights) {
  SampleSet s;
  double x = 0.0;
  for (double w : weights) s.samples.push_back({{x += 1.0, 0.0, 0.0}, w});
  return s;
}

}  // namespace

TEST_CASE("normalize divides by the total") {
  SampleSet s = normalize(make_set({2.0, 2.0}));
  CHECK(s.samples[0].weight == 0.5);
  CHECK(s.samples[1].weight == 0.5);

  SampleSet one = normalize(make_set({3.7}));
  CHECK(one.samples[0].weight == 1.0);

  SampleSet done = normalize(make_set({0.2, 0.3, 0.5}));
  CHECK(done.samples[0].weight == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(done.samples[1].weight == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(done.samples[2].weight == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("normalize sums to one on random sets") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    SampleSet s;
    int n = 1 + rng.uniform_int(40);
    for (int i = 0; i < n; ++i)
      s.samples.push_back({{rng.uniform(), rng.uniform(), 0.0}, rng.uniform(1e-6, 5.0)});
    CHECK(normalize(s).total_weight() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("normalize rejects an all zero set") {
  CHECK_THROWS_AS(normalize(make_set({0.0, 0.0})), std::runtime_error);
}

TEST_CASE("resample collapses onto a degenerate distribution") {
  Rng rng(2);
  SampleSet s = make_set({1.0, 0.0});
  SampleSet out = resample(s, 5, rng);
  REQUIRE(out.size() == 5);
  for (const auto& w : out.samples) {
    CHECK(w.pose.x == s.samples[0].pose.x);
    CHECK(w.weight == doctest::Approx(0.2));
  }
}

TEST_CASE("systematic resampling keeps each equally weighted sample once") {
  Rng rng(3);
  const int k = 12;
  SampleSet s;
  for (int i = 0; i < k; ++i) s.samples.push_back({{double(i), 0.0, 0.0}, 1.0 / k});
  SampleSet out = resample(s, k, rng);
  REQUIRE(out.size() == k);
  std::map<double, int> counts;
  for (const auto& w : out.samples) counts[w.pose.x]++;
  CHECK(counts.size() == k);
  for (const auto& [x, c] : counts) CHECK(c == 1);
}

TEST_CASE("resample copy counts track the weights") {
  Rng rng(4);
  SampleSet s = make_set({0.75, 0.25});
  SampleSet out = resample(s, 10000, rng);
  int first = 0;
  for (const auto& w : out.samples)
    if (w.pose.x == s.samples[0].pose.x) ++first;
  CHECK(first >= 7300);
  CHECK(first <= 7700);
  for (const auto& w : out.samples) CHECK(w.weight == doctest::Approx(1e-4));
}

TEST_CASE("resample rejects bad requests") {
  Rng rng(5);
  SampleSet s = make_set({1.0});
  CHECK_THROWS_AS(resample(s, 0, rng), std::invalid_argument);
  SampleSet empty;
  CHECK_THROWS_AS(resample(empty, 3, rng), std::invalid_argument);
  CHECK_THROWS_AS(resample(make_set({0.0}), 3, rng), std::runtime_error);
}

TEST_CASE("resampling is unbiased for the weighted mean") {
  Rng rng(6);
  SampleSet s;
  for (int i = 0; i < 20; ++i)
    s.samples.push_back({{rng.uniform(0.0, 3.0), 0.0, 0.0}, rng.uniform(0.1, 1.0)});
  s = normalize(s);
  double want = 0.0;
  for (const auto& w : s.samples) want += w.weight * w.pose.x;

  double got = 0.0;
  const int trials = 2000, n_out = 50;
  for (int t = 0; t < trials; ++t) {
    SampleSet out = resample(s, n_out, rng);
    for (const auto& w : out.samples) got += w.pose.x;
  }
  got /= trials * n_out;
  CHECK(got == doctest::Approx(want).epsilon(0.0).scale(1.0));
  CHECK(std::abs(got - want) < 0.05);
}

TEST_CASE("importance step equals the two model ops applied per sample") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  NoiseParams noise;
  OdometryControl u{0.1, 0.4, -0.05};
  ScanObservation y = simulate_scan(map, {5, 5, 0}, default_bearings(16), 6.0);

  SampleSet s;
  Rng gen(7);
  for (int i = 0; i < 100; ++i)
    s.samples.push_back({{gen.uniform(1.0, 9.0), gen.uniform(1.0, 9.0),
                          gen.uniform(-kPi, kPi)}, 1.0});

  Rng a(8), b(8);
  SampleSet fast = importance_step(s, u, y, map, noise, a);

  REQUIRE(fast.size() == s.size());
  for (int i = 0; i < s.size(); ++i) {
    Rng child = b.fork(static_cast<std::uint64_t>(i));
    Pose moved = sample_motion(s.samples[i].pose, u, noise, child);
    CHECK(fast.samples[i].pose.x == moved.x);
    CHECK(fast.samples[i].pose.y == moved.y);
    CHECK(fast.samples[i].pose.theta == moved.theta);
    CHECK(fast.samples[i].weight == likelihood(y, moved, map, noise));
  }
}

TEST_CASE("importance step keeps raw weights and set size") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  NoiseParams noise;
  ScanObservation y = simulate_scan(map, {5, 5, 0}, default_bearings(16), 6.0);
  SampleSet s;
  s.samples.push_back({{5.0, 5.0, 0.0}, 0.123});
  Rng rng(9);
  SampleSet out = importance_step(s, {0, 0, 0}, y, map, noise, rng);
  REQUIRE(out.size() == 1);
  // zero control, zero-magnitude noise: the pose is unchanged, so the weight
  // is the mixture peak
  CHECK(out.samples[0].weight ==
        doctest::Approx(std::min(noise.z_hit + noise.z_rand / 6.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("summarize of identical samples is exact with zero spread") {
  SampleSet s;
  for (int i = 0; i < 5; ++i) s.samples.push_back({{2.0, -1.0, 0.7}, 0.2});
  PoseSummary sum = summarize(s);
  CHECK(sum.mean.x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sum.mean.y == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sum.mean.theta == doctest::Approx(0.7).epsilon(1e-12));
  for (double c : sum.covariance) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("heading averages on the circle not the line") {
  SampleSet s;
  s.samples.push_back({{0.0, 0.0, 3.0}, 0.5});
  s.samples.push_back({{0.0, 0.0, -3.0}, 0.5});
  PoseSummary sum = summarize(s);
  // the unit-vector average points at the wrap, not at zero
  CHECK(std::cos(sum.mean.theta) < -0.9);
}

TEST_CASE("variance of a uniform segment matches the moment formula") {
  Rng rng(10);
  SampleSet s;
  for (int i = 0; i < 10000; ++i)
    s.samples.push_back({{rng.uniform(), 0.0, 0.0}, 1.0 / 10000});
  PoseSummary sum = summarize(s);
  CHECK(sum.covariance[0] == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("summary covariance is symmetric and positive semidefinite") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    SampleSet s;
    int n = 3 + rng.uniform_int(60);
    for (int i = 0; i < n; ++i)
      s.samples.push_back({{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0),
                            rng.uniform(-kPi, kPi)}, rng.uniform(0.05, 1.0)});
    PoseSummary sum = summarize(s);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        CHECK(sum.covariance[r * 3 + c] == doctest::Approx(sum.covariance[c * 3 + r]));
    for (int probe = 0; probe < 25; ++probe) {
      double v[3] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      double q = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) q += v[r] * sum.covariance[r * 3 + c] * v[c];
      CHECK(q >= -1e-12);
    }
  }
}

TEST_CASE("summarize rejects empty or weightless sets") {
  SampleSet empty;
  CHECK_THROWS_AS(summarize(empty), std::invalid_argument);
  CHECK_THROWS_AS(summarize(make_set({0.0, 0.0})), std::runtime_error);
}
