#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ceamcl/driver.hpp"
#include "ceamcl/models.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

struct StepRecord {
  int t = 0;
  OdometryControl control;  // displacement from the previous record
  ScanObservation scan;
  Pose truth;
};

// Waypoint path from start to goal (grid BFS through the door gaps), driven
// with noisy motion; scans are simulated from the true pose with gaussian
// range noise. Record 0 carries the initial scan and zero control.
std::vector<StepRecord> generate_log(const OccupancyGrid& map, const Pose& start,
                                     const Pose& goal, const RunConfig& config,
                                     Rng& rng);

// Text format: header "ceamcl-log 1 beams N max_range M bearings ...", then
// one record per line: t, control(3), ranges(N), truth(3). Bit-exact
// round-trip.
std::string log_to_text(const std::vector<StepRecord>& log);
std::vector<StepRecord> log_from_text(const std::string& text);
void save_log(const std::vector<StepRecord>& log, const std::string& path);
std::vector<StepRecord> load_log(const std::string& path);

inline constexpr int kNever = -1;

struct RunMetrics {
  Variant variant = Variant::Mcl;
  std::uint64_t seed = 0;
  std::vector<double> position_error;
  std::vector<int> sample_total;
  std::vector<int> species_count;
  std::vector<double> resource_total;
  std::vector<double> step_seconds;   // wall clock, excluded from determinism checks
  int converged_step = kNever;        // >= convergence_mass of samples near a ghost pose
  int expired_step = kNever;          // first step after convergence with no species near truth
  bool success = false;               // hypothesis near truth alive at the goal, never expired
};

// True pose plus its images under the map's rotational symmetry.
std::vector<Pose> ghost_poses(const Pose& truth, const OccupancyGrid& map,
                              int symmetry_order);

RunMetrics run_one(const OccupancyGrid& map, const std::vector<StepRecord>& log,
                   Variant variant, const RunConfig& config, std::uint64_t seed);

std::vector<RunMetrics> run_experiment(const OccupancyGrid& map,
                                       const std::vector<StepRecord>& log,
                                       Variant variant, const RunConfig& config,
                                       const std::vector<std::uint64_t>& seeds,
                                       int jobs = 1);

struct SweepResult {
  std::vector<double> deltas;
  // mean_total_samples[i][t]: mean over seeds of the total sample count at
  // step t for deltas[i].
  std::vector<std::vector<double>> mean_total_samples;
  std::vector<double> steady_state;  // mean over the last quarter of steps
};

SweepResult sweep_delta(const OccupancyGrid& map, const std::vector<StepRecord>& log,
                        const std::vector<double>& deltas, const RunConfig& config,
                        const std::vector<std::uint64_t>& seeds, int jobs = 1);

struct CostReport {
  std::vector<double> mcl_seconds, ceamcl_seconds;    // per step
  std::vector<int> mcl_samples, ceamcl_samples;
  CostModel fitted;
  double measured_ratio = 0.0;   // median per-sample step time ratio ceamcl/mcl
  CostRatio predicted;           // from the fitted model at equal sample counts
};

CostReport measure_cost(const OccupancyGrid& map, const std::vector<StepRecord>& log,
                        const RunConfig& config, std::uint64_t seed);

// step,error_m,total_samples,species_count,resources
std::string metrics_to_csv(const RunMetrics& m);
// one aggregate row per variant
std::string compare_to_csv(const std::vector<std::vector<RunMetrics>>& by_variant);
std::string sweep_to_csv(const SweepResult& sweep);
std::string metrics_summary_json(const std::vector<RunMetrics>& runs);

void write_text_atomic(const std::string& text, const std::string& path);

}  // namespace ceamcl
