#pragma once

// Brute-force reference implementations used to cross-check the library's
// fast paths. Slow on purpose; test-only.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ceamcl/world.hpp"

namespace oracle {

// Fine-step ray marching: walk the ray in tiny increments and report the
// first distance whose point is occupied.
inline double march_ray(const ceamcl::OccupancyGrid& map, const ceamcl::Pose& origin,
                        double bearing, double max_range, double step = 0.001) {
  double phi = origin.theta + bearing;
  double dx = std::cos(phi), dy = std::sin(phi);
  for (double t = step; t < max_range; t += step)
    if (map.occupied_at(origin.x + t * dx, origin.y + t * dy)) return t;
  return max_range;
}

struct LvEnd {
  double n1 = 0.0, n2 = 0.0;
  bool settled = false;
};

// Forward Euler on the two-species competition system
//   dN1/dt = r N1 (1 - (N1 + a12 N2) / K1)
//   dN2/dt = r N2 (1 - (N2 + a21 N1) / K2)
// run until the derivatives vanish or the step budget runs out.
inline LvEnd integrate_competition(double k1, double k2, double a12, double a21,
                                   double r, double n1, double n2, double h = 0.1,
                                   long max_steps = 200000) {
  LvEnd end;
  double tol = 1e-12 * (k1 + k2);
  for (long s = 0; s < max_steps; ++s) {
    double d1 = r * n1 * (1.0 - (n1 + a12 * n2) / k1);
    double d2 = r * n2 * (1.0 - (n2 + a21 * n1) / k2);
    n1 = std::max(n1 + h * d1, 0.0);
    n2 = std::max(n2 + h * d2, 0.0);
    if (std::abs(d1) + std::abs(d2) < tol) {
      end.settled = true;
      break;
    }
  }
  end.n1 = n1;
  end.n2 = n2;
  return end;
}

// Least-squares slope of y against its index, starting at `from`.
inline double fit_slope(const std::vector<double>& y, std::size_t from = 0) {
  std::size_t n = y.size() > from ? y.size() - from : 0;
  if (n < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = static_cast<double>(i);
    sx += x;
    sy += y[from + i];
    sxx += x * x;
    sxy += x * y[from + i];
  }
  double d = n * sxx - sx * sx;
  return d != 0.0 ? (n * sxy - sx * sy) / d : 0.0;
}

}  // namespace oracle
