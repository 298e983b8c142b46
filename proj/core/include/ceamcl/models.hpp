#pragma once

#include <vector>

#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

// Relative motion between two odometry readings, decomposed as
// rotate(delta_rot1) -> translate(delta_trans) -> rotate(delta_rot2).
struct OdometryControl {
  double delta_rot1 = 0.0;
  double delta_trans = 0.0;
  double delta_rot2 = 0.0;
};

struct ScanObservation {
  std::vector<double> bearings;  // radians, robot frame
  std::vector<double> ranges;    // meters, clamped to [0, max_range]
  double max_range = 0.0;
};

struct NoiseParams {
  double alpha_trans = 0.05;      // translation noise per meter
  double alpha_rot = 0.05;        // rotation noise per radian
  double alpha_trans_rot = 0.0;   // translation-into-rotation cross term
  double sigma_hit = 0.3;         // beam model gaussian width, meters
  double z_hit = 0.95;
  double z_rand = 0.05;           // z_hit + z_rand = 1
};

// count beams evenly spaced around the full circle, starting straight ahead.
std::vector<double> default_bearings(int count);

// Sample from the odometry motion model. Component noise stds scale with
// the commanded magnitudes, so zero control is reproduced exactly.
// Consumes exactly three gaussian draws.
Pose sample_motion(const Pose& x_prev, const OdometryControl& u,
                   const NoiseParams& noise, Rng& rng);

// Noise-free expected scan at a pose (one raycast per bearing).
ScanObservation simulate_scan(const OccupancyGrid& map, const Pose& pose,
                              const std::vector<double>& bearings,
                              double max_range);

// Beam model: per beam z_hit * exp(-d^2 / (2 sigma_hit^2)) + z_rand/max_range,
// geometric mean across beams. Unit-peak gaussian keeps the result in (0, 1].
// A pose in occupied space or off the map gets the per-beam floor.
double likelihood(const ScanObservation& y, const Pose& x,
                  const OccupancyGrid& map, const NoiseParams& noise);

}  // namespace ceamcl
