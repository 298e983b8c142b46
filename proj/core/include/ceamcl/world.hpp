#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ceamcl {

double wrap_angle(double theta);  // -> [-pi, pi)

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Row-major occupancy grid. Cell (ix, iy) covers the world rectangle
// [origin + i*res, origin + (i+1)*res) on each axis.
struct OccupancyGrid {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<std::uint8_t> cells;

  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && iy >= 0 && ix < width && iy < height;
  }
  // Out of bounds reads as occupied.
  bool occupied(int ix, int iy) const {
    return !in_bounds(ix, iy) || cells[static_cast<std::size_t>(iy) * width + ix] != 0;
  }
  std::uint8_t& at(int ix, int iy) { return cells[static_cast<std::size_t>(iy) * width + ix]; }
  bool world_to_cell(double x, double y, int& ix, int& iy) const;
  bool occupied_at(double x, double y) const;
  double side_x() const { return width * resolution; }
  double side_y() const { return height * resolution; }

  bool operator==(const OccupancyGrid&) const = default;
};

// Closed square map partitioned into rooms_per_side^2 identical rooms by
// single-cell walls, one door gap centered in every internal wall segment.
// For rooms_per_side = 2 the occupancy pattern is exactly 4-fold
// rotationally symmetric about the map center.
OccupancyGrid build_symmetric_map(double side_m, int rooms_per_side,
                                  double door_width_m, double resolution);

// Distance from origin along theta+bearing to the boundary of the first
// occupied cell, clamped to max_range. Grid traversal visits every cell the
// ray passes through.
double raycast(const OccupancyGrid& map, const Pose& origin, double bearing,
               double max_range);

// Plain text format: "width height resolution origin_x origin_y" header,
// then height rows ('#' occupied, '.' free), top row first.
std::string map_to_text(const OccupancyGrid& map);
OccupancyGrid map_from_text(const std::string& text);
void save_map(const OccupancyGrid& map, const std::string& path);
OccupancyGrid load_map(const std::string& path);

}  // namespace ceamcl
