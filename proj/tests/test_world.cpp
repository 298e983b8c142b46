#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"
#include "oracles.hpp"

using namespace ceamcl;

TEST_CASE("wrap_angle lands in the half open interval") {
  for (double t : {0.0, 1.0, -1.0, 3.2, -3.2, 10.0, -10.0, 100.0, -100.0, kPi, -kPi,
                   2.0 * kPi, -2.0 * kPi, 7.0 * kPi}) {
    double w = wrap_angle(t);
    CHECK(w >= -kPi);
    CHECK(w < kPi);
    // same direction on the unit circle
    CHECK(std::cos(w) == doctest::Approx(std::cos(t)).epsilon(1e-9));
    CHECK(std::sin(w) == doctest::Approx(std::sin(t)).epsilon(1e-9));
  }
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
}

TEST_CASE("benchmark map has the right shape") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  CHECK(map.width == 150);
  CHECK(map.height == 150);
  CHECK(map.resolution == 0.1);

  for (int i = 0; i < 150; ++i) {
    CHECK(map.occupied(i, 0));
    CHECK(map.occupied(i, 149));
    CHECK(map.occupied(0, i));
    CHECK(map.occupied(149, i));
  }
}

TEST_CASE("benchmark map walls and doors sit where the geometry says") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  // independent reading of the construction: internal walls on the lines
  // x = 7.5 and y = 7.5, a 1 m door centered in each room half (at 3.75 and
  // 11.25), so the door bands are [3.25, 4.25] and [10.75, 11.75]
  CHECK(map.occupied_at(7.5, 2.0));
  CHECK(map.occupied_at(7.5, 6.0));
  CHECK(map.occupied_at(2.0, 7.5));
  CHECK_FALSE(map.occupied_at(7.5, 3.75));   // door in the vertical wall
  CHECK_FALSE(map.occupied_at(7.5, 11.25));
  CHECK_FALSE(map.occupied_at(3.75, 7.5));   // door in the horizontal wall
  CHECK_FALSE(map.occupied_at(11.25, 7.5));
  CHECK_FALSE(map.occupied_at(3.75, 3.75));  // room centers free
  CHECK_FALSE(map.occupied_at(11.25, 11.25));
  CHECK(map.occupied_at(0.05, 5.0));         // boundary wall
}

TEST_CASE("benchmark map is exactly four fold rotationally symmetric") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  int n = map.width;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      CHECK(map.occupied(ix, iy) == map.occupied(n - 1 - iy, ix));
}

TEST_CASE("single room map is empty inside closed walls") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  CHECK(map.width == 100);
  int interior_occupied = 0;
  for (int iy = 1; iy < 99; ++iy)
    for (int ix = 1; ix < 99; ++ix)
      if (map.occupied(ix, iy)) ++interior_occupied;
  CHECK(interior_occupied == 0);
}

TEST_CASE("map construction rejects bad dimensions") {
  CHECK_THROWS_AS(build_symmetric_map(-1.0, 2, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_symmetric_map(15.0, 0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_symmetric_map(15.0, 2, 8.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_symmetric_map(15.0, 2, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("raycast hits a known wall at the right distance") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  double d = raycast(map, {5.0, 5.0, 0.0}, 0.0, 20.0);
  CHECK(d == doctest::Approx(5.0).epsilon(0.0).scale(1.0));
  CHECK(std::abs(d - 5.0) <= map.resolution);
}

TEST_CASE("raycast clamps to max range") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  CHECK(raycast(map, {5.0, 5.0, 0.0}, 0.0, 0.0) == 0.0);
  CHECK(raycast(map, {5.0, 5.0, 0.0}, 0.0, 2.0) == 2.0);
}

TEST_CASE("raycast rejects bad origins") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  CHECK_THROWS_AS(raycast(map, {0.05, 5.0, 0.0}, 0.0, 20.0), std::invalid_argument);
  CHECK_THROWS_AS(raycast(map, {-3.0, 5.0, 0.0}, 0.0, 20.0), std::invalid_argument);
}

TEST_CASE("raycast agrees with a fine marching reference") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);

  // the spot case first
  double fast = raycast(map, {2.0, 2.0, 0.0}, kPi / 4.0, 20.0);
  double slow = oracle::march_ray(map, {2.0, 2.0, 0.0}, kPi / 4.0, 20.0);
  CHECK(std::abs(fast - slow) <= map.resolution);

  Rng rng(77);
  int tested = 0;
  while (tested < 200) {
    Pose p{rng.uniform(0.3, 14.7), rng.uniform(0.3, 14.7), rng.uniform(-kPi, kPi)};
    if (map.occupied_at(p.x, p.y)) continue;
    double bearing = rng.uniform(-kPi, kPi);
    double a = raycast(map, p, bearing, 8.0);
    double b = oracle::march_ray(map, p, bearing, 8.0);
    CHECK(a >= 0.0);
    CHECK(a <= 8.0);
    CHECK(std::abs(a - b) <= map.resolution);
    ++tested;
  }
}

TEST_CASE("raycast is deterministic") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  Pose p{3.1, 4.2, 0.7};
  double first = raycast(map, p, 1.234, 9.0);
  for (int i = 0; i < 5; ++i) CHECK(raycast(map, p, 1.234, 9.0) == first);
}

TEST_CASE("scans repeat exactly under the map's quarter turn") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  double cx = 7.5, cy = 7.5;
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    Pose p{rng.uniform(1.0, 6.5), rng.uniform(1.0, 6.5), rng.uniform(-kPi, kPi)};
    if (map.occupied_at(p.x, p.y)) continue;
    Pose q{cx - (p.y - cy), cy + (p.x - cx), wrap_angle(p.theta + kPi / 2.0)};
    REQUIRE_FALSE(map.occupied_at(q.x, q.y));
    for (int b = 0; b < 8; ++b) {
      double bearing = b * kPi / 4.0;
      CHECK(raycast(map, p, bearing, 4.0) ==
            doctest::Approx(raycast(map, q, bearing, 4.0)).epsilon(1e-9));
    }
  }
}

TEST_CASE("scans repeat across rooms for beams that stay inside a room") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  // beams aimed at the room's own walls, away from the door gaps, look the
  // same from the matching spot of the neighbouring room
  Pose a{3.0, 3.0, 0.0};
  Pose b{a.x + 7.5, a.y, a.theta};
  for (double bearing : {2.3, 2.9, -2.3, -2.9, 1.2, -1.2}) {
    double da = raycast(map, a, bearing, 4.0);
    double db = raycast(map, b, bearing, 4.0);
    CHECK(std::abs(da - db) <= map.resolution);
  }
}

TEST_CASE("map text round trips exactly") {
  OccupancyGrid map = build_symmetric_map(15.0, 2, 1.0, 0.1);
  std::string text = map_to_text(map);
  OccupancyGrid back = map_from_text(text);
  CHECK(back == map);
  CHECK(map_to_text(back) == text);
}

TEST_CASE("map files round trip through disk") {
  OccupancyGrid map = build_symmetric_map(10.0, 1, 1.0, 0.1);
  std::string path = "test_world_map.txt";
  save_map(map, path);
  OccupancyGrid back = load_map(path);
  CHECK(back == map);
  std::remove(path.c_str());
}

TEST_CASE("map parser rejects malformed input") {
  CHECK_THROWS_AS(map_from_text("garbage"), std::runtime_error);
  CHECK_THROWS_AS(map_from_text("2 2 0.1 0 0\n##\n"), std::runtime_error);
  CHECK_THROWS_AS(map_from_text("2 2 0.1 0 0\n#x\n##\n"), std::runtime_error);
  CHECK_THROWS_AS(map_from_text("0 2 0.1 0 0\n"), std::runtime_error);
  CHECK_THROWS_AS(load_map("no_such_file_anywhere.txt"), std::runtime_error);
}
