#include "ceamcl/harness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "ceamcl/perf.hpp"

namespace ceamcl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// shortest grid path between two free cells, 4-connected, obstacles
// inflated by clearance_cells
std::vector<std::pair<int, int>> grid_path(const OccupancyGrid& map, int sx, int sy,
                                           int gx, int gy, int clearance_cells) {
  auto blocked = [&](int x, int y) {
    for (int dy = -clearance_cells; dy <= clearance_cells; ++dy)
      for (int dx = -clearance_cells; dx <= clearance_cells; ++dx)
        if (map.occupied(x + dx, y + dy)) return true;
    return false;
  };
  if (blocked(sx, sy) || blocked(gx, gy))
    throw std::runtime_error("generate_log: start or goal too close to a wall");

  std::vector<int> parent(static_cast<std::size_t>(map.width) * map.height, -1);
  auto idx = [&](int x, int y) { return y * map.width + x; };
  std::deque<std::pair<int, int>> queue{{sx, sy}};
  parent[idx(sx, sy)] = idx(sx, sy);
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    if (x == gx && y == gy) break;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int nx = x + dx[d], ny = y + dy[d];
      if (!map.in_bounds(nx, ny) || parent[idx(nx, ny)] >= 0 || blocked(nx, ny)) continue;
      parent[idx(nx, ny)] = idx(x, y);
      queue.push_back({nx, ny});
    }
  }
  if (parent[idx(gx, gy)] < 0) throw std::runtime_error("generate_log: goal unreachable");

  std::vector<std::pair<int, int>> path;
  int c = idx(gx, gy);
  while (parent[c] != c) {
    path.push_back({c % map.width, c / map.width});
    c = parent[c];
  }
  path.push_back({sx, sy});
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<StepRecord> generate_log(const OccupancyGrid& map, const Pose& start,
                                     const Pose& goal, const RunConfig& config,
                                     Rng& rng) {
  if (map.occupied_at(start.x, start.y) || map.occupied_at(goal.x, goal.y))
    throw std::runtime_error("generate_log: start or goal in occupied space");

  std::vector<double> bearings = default_bearings(config.beams);
  double res = map.resolution;
  int sx, sy, gx, gy;
  map.world_to_cell(start.x, start.y, sx, sy);
  map.world_to_cell(goal.x, goal.y, gx, gy);

  std::vector<StepRecord> log;
  Pose truth = start;
  auto scan_at = [&](const Pose& p) {
    ScanObservation y = simulate_scan(map, p, bearings, config.scan_max_range);
    for (auto& r : y.ranges)
      r = std::clamp(r + rng.gaussian() * config.noise.sigma_hit, 0.0, config.scan_max_range);
    return y;
  };
  log.push_back({0, OdometryControl{}, scan_at(truth), truth});

  if (sx == gx && sy == gy) return log;

  auto path = grid_path(map, sx, sy, gx, gy, 2);
  // waypoints roughly every meter plus the goal
  std::vector<std::pair<double, double>> waypoints;
  int stride = std::max<int>(1, static_cast<int>(std::llround(1.0 / res)));
  for (std::size_t i = stride; i < path.size(); i += stride)
    waypoints.push_back({(path[i].first + 0.5) * res + map.origin_x,
                         (path[i].second + 0.5) * res + map.origin_y});
  waypoints.push_back({goal.x, goal.y});

  int t = 0;
  const int max_steps = 100000;
  for (std::size_t w = 0; w < waypoints.size(); ++w) {
    auto [wx, wy] = waypoints[w];
    bool last = w + 1 == waypoints.size();
    while (t < max_steps) {
      double dx = wx - truth.x, dy = wy - truth.y;
      double dist = std::hypot(dx, dy);
      if (dist < (last ? 0.1 : 0.3)) break;
      OdometryControl u;
      u.delta_rot1 = wrap_angle(std::atan2(dy, dx) - truth.theta);
      u.delta_trans = std::min(config.step_len, dist);
      u.delta_rot2 = 0.0;
      // redraw the execution noise if the robot would end up inside a wall
      Pose next;
      bool placed = false;
      for (int attempt = 0; attempt < 20; ++attempt) {
        next = sample_motion(truth, u, config.noise, rng);
        if (!map.occupied_at(next.x, next.y)) {
          placed = true;
          break;
        }
      }
      if (!placed) {
        NoiseParams quiet = config.noise;
        quiet.alpha_trans = quiet.alpha_rot = quiet.alpha_trans_rot = 0.0;
        Rng null_rng(0);
        next = sample_motion(truth, u, quiet, null_rng);
        if (map.occupied_at(next.x, next.y)) throw std::runtime_error("generate_log: wedged against a wall");
      }
      truth = next;
      ++t;
      log.push_back({t, u, scan_at(truth), truth});
    }
  }
  return log;
}

std::string log_to_text(const std::vector<StepRecord>& log) {
  if (log.empty()) throw std::invalid_argument("log_to_text: empty log");
  const ScanObservation& y0 = log[0].scan;
  std::string out = "ceamcl-log 1 beams " + std::to_string(y0.bearings.size()) +
                    " max_range " + fmt(y0.max_range) + " bearings";
  for (double b : y0.bearings) out += " " + fmt(b);
  out += "\n";
  for (const auto& rec : log) {
    out += std::to_string(rec.t);
    out += " " + fmt(rec.control.delta_rot1) + " " + fmt(rec.control.delta_trans) +
           " " + fmt(rec.control.delta_rot2);
    for (double r : rec.scan.ranges) out += " " + fmt(r);
    out += " " + fmt(rec.truth.x) + " " + fmt(rec.truth.y) + " " + fmt(rec.truth.theta);
    out += "\n";
  }
  return out;
}

std::vector<StepRecord> log_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int version = 0, beams = 0;
  std::string kw1, kw2, kw3;
  double max_range = 0.0;
  if (!(in >> tag >> version >> kw1 >> beams >> kw2 >> max_range >> kw3) ||
      tag != "ceamcl-log" || version != 1 || kw1 != "beams" || kw2 != "max_range" ||
      kw3 != "bearings" || beams < 0)
    throw std::runtime_error("log text: bad header");
  std::vector<double> bearings(beams);
  for (auto& b : bearings)
    if (!(in >> b)) throw std::runtime_error("log text: truncated bearings");

  std::vector<StepRecord> log;
  StepRecord rec;
  while (in >> rec.t) {
    if (!(in >> rec.control.delta_rot1 >> rec.control.delta_trans >> rec.control.delta_rot2))
      throw std::runtime_error("log text: truncated control");
    rec.scan.bearings = bearings;
    rec.scan.max_range = max_range;
    rec.scan.ranges.resize(beams);
    for (auto& r : rec.scan.ranges)
      if (!(in >> r)) throw std::runtime_error("log text: truncated ranges");
    if (!(in >> rec.truth.x >> rec.truth.y >> rec.truth.theta))
      throw std::runtime_error("log text: truncated truth");
    log.push_back(rec);
  }
  if (log.empty()) throw std::runtime_error("log text: no records");
  return log;
}

void save_log(const std::vector<StepRecord>& log, const std::string& path) {
  write_text_atomic(log_to_text(log), path);
}

std::vector<StepRecord> load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open log file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return log_from_text(buf.str());
}

std::vector<Pose> ghost_poses(const Pose& truth, const OccupancyGrid& map,
                              int symmetry_order) {
  if (symmetry_order < 1) symmetry_order = 1;
  double cx = map.origin_x + 0.5 * map.side_x();
  double cy = map.origin_y + 0.5 * map.side_y();
  std::vector<Pose> out;
  for (int k = 0; k < symmetry_order; ++k) {
    double a = 2.0 * kPi * k / symmetry_order;
    double ca = std::cos(a), sa = std::sin(a);
    double dx = truth.x - cx, dy = truth.y - cy;
    out.push_back({cx + ca * dx - sa * dy, cy + sa * dx + ca * dy,
                   wrap_angle(truth.theta + a)});
  }
  return out;
}

RunMetrics run_one(const OccupancyGrid& map, const std::vector<StepRecord>& log,
                   Variant variant, const RunConfig& config, std::uint64_t seed) {
  if (log.empty()) throw std::invalid_argument("run_one: empty log");
  RunMetrics m;
  m.variant = variant;
  m.seed = seed;

  auto record = [&](const FilterState& state, const Pose& truth, double seconds) {
    PoseSummary est = state.estimate();
    m.position_error.push_back(std::hypot(est.mean.x - truth.x, est.mean.y - truth.y));
    m.sample_total.push_back(state.total_samples());
    m.species_count.push_back(static_cast<int>(state.species.size()));
    m.resource_total.push_back(state.total_resources);
    m.step_seconds.push_back(seconds);

    int t = static_cast<int>(m.position_error.size()) - 1;
    if (m.converged_step == kNever) {
      auto ghosts = ghost_poses(truth, map, config.symmetry_order);
      int near = 0, total = 0;
      for (const auto& sp : state.species)
        for (const auto& s : sp.samples.samples) {
          ++total;
          for (const auto& g : ghosts) {
            if (std::hypot(s.pose.x - g.x, s.pose.y - g.y) <= config.association_radius) {
              ++near;
              break;
            }
          }
        }
      if (total > 0 && near >= config.convergence_mass * total) m.converged_step = t;
    }
    if (m.converged_step != kNever && m.expired_step == kNever) {
      bool alive = false;
      for (const auto& sp : state.species) {
        PoseSummary s = summarize(sp.samples);
        if (std::hypot(s.mean.x - truth.x, s.mean.y - truth.y) <= config.association_radius) {
          alive = true;
          break;
        }
      }
      if (!alive) m.expired_step = t;
    }
  };

  try {
    auto t0 = std::chrono::steady_clock::now();
    FilterState state = init(variant, map, log[0].scan, config, seed);
    record(state, log[0].truth, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    for (std::size_t i = 1; i < log.size(); ++i) {
      t0 = std::chrono::steady_clock::now();
      step(state, log[i].control, log[i].scan);
      record(state, log[i].truth,
             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    bool alive_at_goal = false;
    for (const auto& sp : state.species) {
      PoseSummary s = summarize(sp.samples);
      if (std::hypot(s.mean.x - log.back().truth.x, s.mean.y - log.back().truth.y) <=
          config.association_radius) {
        alive_at_goal = true;
        break;
      }
    }
    m.success = alive_at_goal && m.expired_step == kNever;
  } catch (const std::runtime_error&) {
    // filter divergence (e.g. total extinction) counts as failure
    m.success = false;
    if (m.expired_step == kNever && m.converged_step != kNever)
      m.expired_step = static_cast<int>(m.position_error.size());
  }
  return m;
}

std::vector<RunMetrics> run_experiment(const OccupancyGrid& map,
                                       const std::vector<StepRecord>& log,
                                       Variant variant, const RunConfig& config,
                                       const std::vector<std::uint64_t>& seeds,
                                       int jobs) {
  std::vector<RunMetrics> out(seeds.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      out[i] = run_one(map, log, variant, config, seeds[i]);
    return out;
  }
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= seeds.size()) return;
      out[i] = run_one(map, log, variant, config, seeds[i]);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < std::min<int>(jobs, static_cast<int>(seeds.size())); ++j)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

SweepResult sweep_delta(const OccupancyGrid& map, const std::vector<StepRecord>& log,
                        const std::vector<double>& deltas, const RunConfig& config,
                        const std::vector<std::uint64_t>& seeds, int jobs) {
  SweepResult sweep;
  sweep.deltas = deltas;
  for (double d : deltas) {
    RunConfig cfg = config;
    cfg.dynamics.delta = d;
    auto runs = run_experiment(map, log, Variant::Ceamcl, cfg, seeds, jobs);
    std::size_t steps = log.size();
    std::vector<double> mean(steps, 0.0);
    std::vector<int> counts(steps, 0);
    for (const auto& r : runs)
      for (std::size_t t = 0; t < r.sample_total.size() && t < steps; ++t) {
        mean[t] += r.sample_total[t];
        counts[t]++;
      }
    for (std::size_t t = 0; t < steps; ++t)
      if (counts[t] > 0) mean[t] /= counts[t];
    double steady = 0.0;
    std::size_t tail = std::max<std::size_t>(1, steps / 4);
    for (std::size_t t = steps - tail; t < steps; ++t) steady += mean[t];
    sweep.steady_state.push_back(steady / tail);
    sweep.mean_total_samples.push_back(std::move(mean));
  }
  return sweep;
}

CostReport measure_cost(const OccupancyGrid& map, const std::vector<StepRecord>& log,
                        const RunConfig& config, std::uint64_t seed) {
  CostReport report;

  struct Row {
    double n_lik, n_motion, n_resampled, seconds;
  };
  std::vector<Row> rows;

  auto run_variant = [&](Variant variant, std::vector<double>& seconds,
                         std::vector<int>& sizes) {
    FilterState state = init(variant, map, log[0].scan, config, seed);
    for (std::size_t i = 1; i < log.size(); ++i) {
      PerfCounters before = perf();
      auto t0 = std::chrono::steady_clock::now();
      step(state, log[i].control, log[i].scan);
      double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      PerfCounters after = perf();
      seconds.push_back(dt);
      sizes.push_back(state.total_samples());
      rows.push_back({static_cast<double>(after.likelihood_calls - before.likelihood_calls),
                      static_cast<double>(after.motion_draws - before.motion_draws),
                      static_cast<double>(after.resampled_samples - before.resampled_samples),
                      dt});
    }
  };

  double sm_before = perf().split_merge_seconds;
  std::uint64_t ceamcl_ops = perf().motion_draws;
  run_variant(Variant::Ceamcl, report.ceamcl_seconds, report.ceamcl_samples);
  double sm_seconds = perf().split_merge_seconds - sm_before;
  std::uint64_t ceamcl_motion = perf().motion_draws - ceamcl_ops;
  run_variant(Variant::Mcl, report.mcl_seconds, report.mcl_samples);

  // two identifiable cost groups: likelihood evals and everything
  // per-sample (motion + resample bookkeeping); split evenly for reporting
  Eigen::MatrixXd a(rows.size(), 2);
  Eigen::VectorXd b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a(i, 0) = rows[i].n_lik;
    a(i, 1) = rows[i].n_motion + rows[i].n_resampled;
    b(i) = rows[i].seconds;
  }
  Eigen::Vector2d coef = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  report.fitted.t_f = std::max(coef(0), 0.0);
  report.fitted.t_s = report.fitted.t_r = std::max(coef(1), 0.0) / 2.0;
  report.fitted.t_m = ceamcl_motion > 0 ? sm_seconds / ceamcl_motion : 0.0;
  report.fitted.p = config.evolution.p_c + config.evolution.p_m;

  std::vector<double> ratios;
  std::size_t steps = std::min(report.mcl_seconds.size(), report.ceamcl_seconds.size());
  for (std::size_t t = 0; t < steps; ++t) {
    if (report.mcl_samples[t] <= 0 || report.ceamcl_samples[t] <= 0) continue;
    double per_c = report.ceamcl_seconds[t] / report.ceamcl_samples[t];
    double per_m = report.mcl_seconds[t] / report.mcl_samples[t];
    if (per_m > 0.0) ratios.push_back(per_c / per_m);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    report.measured_ratio = ratios[ratios.size() / 2];
  }
  report.predicted = predict_cost_ratio(report.fitted, 1, 1);
  return report;
}

std::string metrics_to_csv(const RunMetrics& m) {
  std::string out = "step,error_m,total_samples,species_count,resources\n";
  for (std::size_t t = 0; t < m.position_error.size(); ++t) {
    out += std::to_string(t) + "," + fmt(m.position_error[t]) + "," +
           std::to_string(m.sample_total[t]) + "," + std::to_string(m.species_count[t]) +
           "," + fmt(m.resource_total[t]) + "\n";
  }
  return out;
}

namespace {

struct Aggregate {
  int runs = 0;
  double success_rate = 0.0;
  double expired_never_rate = 0.0;
  double mean_converged = 0.0;
  double mean_final_error = 0.0;
  double mean_final_samples = 0.0;
};

Aggregate aggregate(const std::vector<RunMetrics>& runs) {
  Aggregate a;
  a.runs = static_cast<int>(runs.size());
  int converged_count = 0;
  for (const auto& r : runs) {
    a.success_rate += r.success ? 1.0 : 0.0;
    a.expired_never_rate += r.expired_step == kNever ? 1.0 : 0.0;
    if (r.converged_step != kNever) {
      a.mean_converged += r.converged_step;
      converged_count++;
    }
    if (!r.position_error.empty()) a.mean_final_error += r.position_error.back();
    if (!r.sample_total.empty()) a.mean_final_samples += r.sample_total.back();
  }
  if (a.runs > 0) {
    a.success_rate /= a.runs;
    a.expired_never_rate /= a.runs;
    a.mean_final_error /= a.runs;
    a.mean_final_samples /= a.runs;
  }
  a.mean_converged = converged_count > 0 ? a.mean_converged / converged_count : -1.0;
  return a;
}

}  // namespace

std::string compare_to_csv(const std::vector<std::vector<RunMetrics>>& by_variant) {
  std::string out =
      "variant,runs,success_rate,expired_never_rate,mean_converged_step,"
      "mean_final_error_m,mean_final_samples\n";
  for (const auto& runs : by_variant) {
    if (runs.empty()) continue;
    Aggregate a = aggregate(runs);
    out += std::string(variant_name(runs[0].variant)) + "," + std::to_string(a.runs) + "," +
           fmt(a.success_rate) + "," + fmt(a.expired_never_rate) + "," +
           fmt(a.mean_converged) + "," + fmt(a.mean_final_error) + "," +
           fmt(a.mean_final_samples) + "\n";
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out = "delta,step,mean_total_samples\n";
  for (std::size_t i = 0; i < sweep.deltas.size(); ++i)
    for (std::size_t t = 0; t < sweep.mean_total_samples[i].size(); ++t)
      out += fmt(sweep.deltas[i]) + "," + std::to_string(t) + "," +
             fmt(sweep.mean_total_samples[i][t]) + "\n";
  return out;
}

std::string metrics_summary_json(const std::vector<RunMetrics>& runs) {
  nlohmann::json j;
  if (!runs.empty()) j["variant"] = variant_name(runs[0].variant);
  Aggregate a = aggregate(runs);
  j["runs"] = a.runs;
  j["success_rate"] = a.success_rate;
  j["expired_never_rate"] = a.expired_never_rate;
  j["mean_converged_step"] = a.mean_converged;
  j["mean_final_error_m"] = a.mean_final_error;
  j["mean_final_samples"] = a.mean_final_samples;
  j["seeds"] = nlohmann::json::array();
  for (const auto& r : runs) {
    j["seeds"].push_back({{"seed", r.seed},
                          {"success", r.success},
                          {"converged_step", r.converged_step},
                          {"expired_step", r.expired_step}});
  }
  return j.dump(2) + "\n";
}

void write_text_atomic(const std::string& text, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path);
}

}  // namespace ceamcl
