#include "ceamcl/world.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ceamcl {

double wrap_angle(double theta) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  double t = theta - two_pi * std::floor((theta + 0.5 * two_pi) / two_pi);
  // floor form lands in [-pi, pi); guard the rare rounding escape
  if (t < -0.5 * two_pi || t >= 0.5 * two_pi) t = std::fmod(t + 0.5 * two_pi, two_pi) - 0.5 * two_pi;
  return t;
}

bool OccupancyGrid::world_to_cell(double x, double y, int& ix, int& iy) const {
  ix = static_cast<int>(std::floor((x - origin_x) / resolution));
  iy = static_cast<int>(std::floor((y - origin_y) / resolution));
  return in_bounds(ix, iy);
}

bool OccupancyGrid::occupied_at(double x, double y) const {
  int ix, iy;
  if (!world_to_cell(x, y, ix, iy)) return true;
  return occupied(ix, iy);
}

namespace {

// Cells [lo, hi) whose full extent lies inside [a, b], in units of res.
void span_inside(double a, double b, double res, int& lo, int& hi) {
  lo = static_cast<int>(std::ceil(a / res - 1e-9));
  hi = static_cast<int>(std::floor(b / res + 1e-9));
}

// Cell columns/rows touched by a grid-aligned wall line at coordinate c (meters).
void wall_cells(double c, double res, int n, int& lo, int& hi) {
  double u = c / res;
  double r = std::round(u);
  if (std::abs(u - r) < 1e-9) {
    // line on a cell boundary: both adjacent cells are touched
    lo = static_cast<int>(r) - 1;
    hi = static_cast<int>(r);
  } else {
    lo = hi = static_cast<int>(std::floor(u));
  }
  if (lo < 0) lo = 0;
  if (hi > n - 1) hi = n - 1;
}

}  // namespace

OccupancyGrid build_symmetric_map(double side_m, int rooms_per_side,
                                  double door_width_m, double resolution) {
  if (side_m <= 0.0 || resolution <= 0.0 || rooms_per_side < 1)
    throw std::invalid_argument("build_symmetric_map: invalid dimensions");
  double room = side_m / rooms_per_side;
  if (door_width_m < 0.0 || door_width_m >= room)
    throw std::invalid_argument("build_symmetric_map: door wider than a room");

  int n = static_cast<int>(std::llround(side_m / resolution));
  if (n < 3) throw std::invalid_argument("build_symmetric_map: map too small");

  OccupancyGrid map;
  map.width = map.height = n;
  map.resolution = resolution;
  map.cells.assign(static_cast<std::size_t>(n) * n, 0);

  for (int i = 0; i < n; ++i) {
    map.at(i, 0) = map.at(i, n - 1) = 1;
    map.at(0, i) = map.at(n - 1, i) = 1;
  }

  for (int k = 1; k < rooms_per_side; ++k) {
    int wlo, whi;
    wall_cells(k * room, resolution, n, wlo, whi);
    for (int w = wlo; w <= whi; ++w)
      for (int i = 0; i < n; ++i) {
        map.at(w, i) = 1;  // vertical wall at x = k*room
        map.at(i, w) = 1;  // horizontal wall at y = k*room
      }
  }

  // One door centered in every internal wall segment between adjacent rooms.
  for (int k = 1; k < rooms_per_side; ++k) {
    int wlo, whi;
    wall_cells(k * room, resolution, n, wlo, whi);
    for (int j = 0; j < rooms_per_side; ++j) {
      double c = (j + 0.5) * room;
      int lo, hi;
      span_inside(c - 0.5 * door_width_m, c + 0.5 * door_width_m, resolution, lo, hi);
      for (int g = lo; g < hi; ++g)
        for (int w = wlo; w <= whi; ++w) {
          if (g > 0 && g < n - 1) {
            map.at(w, g) = 0;
            map.at(g, w) = 0;
          }
        }
    }
  }
  return map;
}

double raycast(const OccupancyGrid& map, const Pose& origin, double bearing,
               double max_range) {
  if (max_range <= 0.0) return 0.0;
  int ix, iy;
  if (!map.world_to_cell(origin.x, origin.y, ix, iy))
    throw std::invalid_argument("raycast: origin outside the map");
  if (map.occupied(ix, iy))
    throw std::invalid_argument("raycast: origin in an occupied cell");

  double phi = origin.theta + bearing;
  double dx = std::cos(phi), dy = std::sin(phi);
  const double inf = std::numeric_limits<double>::infinity();

  int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  double res = map.resolution;

  auto boundary = [&](int i, int s, double o, double p, double d) {
    if (s == 0) return inf;
    double edge = o + (s > 0 ? (i + 1) : i) * res;
    return (edge - p) / d;
  };
  double t_max_x = boundary(ix, step_x, map.origin_x, origin.x, dx);
  double t_max_y = boundary(iy, step_y, map.origin_y, origin.y, dy);
  double t_delta_x = step_x ? res / std::abs(dx) : inf;
  double t_delta_y = step_y ? res / std::abs(dy) : inf;

  while (true) {
    double t;
    if (t_max_x <= t_max_y) {
      t = t_max_x;
      ix += step_x;
      t_max_x += t_delta_x;
    } else {
      t = t_max_y;
      iy += step_y;
      t_max_y += t_delta_y;
    }
    if (t >= max_range) return max_range;
    if (map.occupied(ix, iy)) return t;
  }
}

std::string map_to_text(const OccupancyGrid& map) {
  char head[160];
  std::snprintf(head, sizeof head, "%d %d %.17g %.17g %.17g\n", map.width,
                map.height, map.resolution, map.origin_x, map.origin_y);
  std::string out = head;
  out.reserve(out.size() + static_cast<std::size_t>(map.height) * (map.width + 1));
  for (int iy = map.height - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < map.width; ++ix)
      out.push_back(map.occupied(ix, iy) ? '#' : '.');
    out.push_back('\n');
  }
  return out;
}

OccupancyGrid map_from_text(const std::string& text) {
  std::istringstream in(text);
  OccupancyGrid map;
  if (!(in >> map.width >> map.height >> map.resolution >> map.origin_x >> map.origin_y))
    throw std::runtime_error("map text: bad header");
  if (map.width <= 0 || map.height <= 0 || map.resolution <= 0.0)
    throw std::runtime_error("map text: bad dimensions");
  map.cells.assign(static_cast<std::size_t>(map.width) * map.height, 0);
  std::string line;
  std::getline(in, line);  // rest of header line
  for (int iy = map.height - 1; iy >= 0; --iy) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) < map.width)
      throw std::runtime_error("map text: truncated rows");
    for (int ix = 0; ix < map.width; ++ix) {
      char c = line[ix];
      if (c != '#' && c != '.') throw std::runtime_error("map text: bad cell char");
      map.at(ix, iy) = c == '#' ? 1 : 0;
    }
  }
  return map;
}

void save_map(const OccupancyGrid& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << map_to_text(map);
}

OccupancyGrid load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return map_from_text(buf.str());
}

}  // namespace ceamcl
