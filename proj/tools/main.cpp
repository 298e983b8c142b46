// ceamcl command line front end.
//
// Exit codes: 0 ok, 2 usage or bad arguments, 3 unreadable or malformed
// input file, 4 runtime failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ceamcl/driver.hpp"
#include "ceamcl/harness.hpp"
#include "ceamcl/world.hpp"

namespace {

using namespace ceamcl;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

OccupancyGrid load_map_checked(const std::string& path) {
  try {
    return load_map(path);
  } catch (const std::exception& e) {
    throw FileError(e.what());
  }
}

std::vector<StepRecord> load_log_checked(const std::string& path) {
  try {
    return load_log(path);
  } catch (const std::exception& e) {
    throw FileError(e.what());
  }
}

// Model parameters shared by the log/run/compare/sweep/cost commands.
// Precedence: built-in defaults, then the config file, then explicit flags.
struct ModelOptions {
  RunConfig cfg;
  std::string config_path;
  double sigma_mut_xy = 0.1, sigma_mut_theta = 0.05;
  std::map<std::string, std::pair<CLI::Option*, double*>> doubles;
  std::map<std::string, std::pair<CLI::Option*, int*>> ints;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value parameter file");
    auto dbl = [&](const std::string& key, const std::string& flag, double& ref,
                   const std::string& help) {
      doubles[key] = {sub->add_option(flag, ref, help), &ref};
    };
    auto num = [&](const std::string& key, const std::string& flag, int& ref,
                   const std::string& help) {
      ints[key] = {sub->add_option(flag, ref, help), &ref};
    };
    dbl("alpha_trans", "--alpha-trans", cfg.noise.alpha_trans, "translation noise per meter");
    dbl("alpha_rot", "--alpha-rot", cfg.noise.alpha_rot, "rotation noise per radian");
    dbl("alpha_trans_rot", "--alpha-trans-rot", cfg.noise.alpha_trans_rot,
        "rotation noise per meter translated");
    dbl("sigma_hit", "--sigma-hit", cfg.noise.sigma_hit, "range noise std (m)");
    dbl("z_hit", "--z-hit", cfg.noise.z_hit, "hit mixture weight");
    dbl("z_rand", "--z-rand", cfg.noise.z_rand, "uniform mixture weight");
    dbl("r", "--r", cfg.dynamics.r, "population growth rate");
    dbl("delta", "--delta", cfg.dynamics.delta, "resources per unit of living-domain area");
    dbl("epsilon", "--epsilon", cfg.dynamics.epsilon, "living-domain area floor");
    dbl("p_c", "--pc", cfg.evolution.p_c, "crossover probability");
    dbl("p_m", "--pm", cfg.evolution.p_m, "mutation probability");
    dbl("sigma_mut_xy", "--sigma-mut-xy", sigma_mut_xy, "mutation std for x and y (m)");
    dbl("sigma_mut_theta", "--sigma-mut-theta", sigma_mut_theta, "mutation std for theta (rad)");
    dbl("mu", "--mu", cfg.mu, "grid threshold factor");
    dbl("eta", "--eta", cfg.eta, "initial samples per matched grid cell");
    dbl("max_range", "--max-range", cfg.scan_max_range, "scanner max range (m)");
    dbl("step_len", "--step-len", cfg.step_len, "commanded translation per step (m)");
    dbl("association_radius", "--association-radius", cfg.association_radius,
        "hypothesis-to-pose match radius (m)");
    dbl("convergence_mass", "--convergence-mass", cfg.convergence_mass,
        "sample fraction near a hypothesis that counts as converged");
    num("grid_nx", "--grid-nx", cfg.grid_nx, "clustering grid columns");
    num("grid_ny", "--grid-ny", cfg.grid_ny, "clustering grid rows");
    num("n_test", "--n-test", cfg.n_test, "test set size for initialization");
    num("fixed_n", "--fixed-n", cfg.fixed_n, "sample count for mcl and gmcl");
    num("beams", "--beams", cfg.beams, "scanner beam count");
    num("min_species_samples", "--min-species-samples", cfg.min_species_samples,
        "sample floor per species");
    num("symmetry_order", "--symmetry-order", cfg.symmetry_order,
        "rotational symmetry order used for ghost hypotheses");
  }

  // Apply config file values for keys whose flag was not given explicitly.
  void finalize() {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw FileError("cannot open config file: " + config_path);
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = line.substr(0, line.find('#'));
        if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("config line " + std::to_string(line_no) +
                                      ": expected key = value");
        auto trim = [](std::string s) {
          auto b = s.find_first_not_of(" \t\r");
          auto e = s.find_last_not_of(" \t\r");
          return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        try {
          if (auto it = doubles.find(key); it != doubles.end()) {
            if (it->second.first->count() == 0) *it->second.second = std::stod(value);
          } else if (auto jt = ints.find(key); jt != ints.end()) {
            if (jt->second.first->count() == 0) *jt->second.second = std::stoi(value);
          } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
          }
        } catch (const std::invalid_argument&) {
          throw;
        } catch (const std::exception&) {
          throw std::invalid_argument("config line " + std::to_string(line_no) +
                                      ": bad value for '" + key + "'");
        }
      }
    }
    cfg.evolution.sigma_mut = {sigma_mut_xy, sigma_mut_xy, sigma_mut_theta};
  }
};

std::uint64_t* add_seed_option(CLI::App* sub, std::uint64_t& seed) {
  sub->add_option("--seed", seed, "rng seed")->envname("CEAMCL_SEED");
  return &seed;
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, int count) {
  std::vector<std::uint64_t> seeds(count);
  for (int i = 0; i < count; ++i) seeds[i] = base + i;
  return seeds;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty())
    std::cout << text;
  else
    write_text_atomic(text, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive particle localization on occupancy grid maps"};
  app.set_version_flag("--version", "ceamcl 0.1.0");
  app.require_subcommand(1);

  std::function<void()> action;

  // gen-map
  {
    auto* sub = app.add_subcommand("gen-map", "generate a square multi-room map");
    auto side = std::make_shared<double>(15.0);
    auto rooms = std::make_shared<int>(2);
    auto door = std::make_shared<double>(1.0);
    auto resolution = std::make_shared<double>(0.1);
    auto out = std::make_shared<std::string>();
    sub->add_option("--side", *side, "side length (m)");
    sub->add_option("--rooms", *rooms, "rooms per side");
    sub->add_option("--door", *door, "door width (m)");
    sub->add_option("--resolution", *resolution, "cell size (m)");
    sub->add_option("--out", *out, "output map file")->required();
    sub->callback([=, &action] {
      action = [=] {
        save_map(build_symmetric_map(*side, *rooms, *door, *resolution), *out);
      };
    });
  }

  // gen-log
  {
    auto* sub = app.add_subcommand("gen-log", "drive a simulated robot and record a log");
    auto opts = std::make_shared<ModelOptions>();
    opts->attach(sub);
    auto map_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto start = std::make_shared<std::vector<double>>(std::vector<double>{3.75, 3.75, 0.0});
    auto goal = std::make_shared<std::vector<double>>(std::vector<double>{13.5, 13.5});
    auto seed = std::make_shared<std::uint64_t>(1);
    sub->add_option("--map", *map_path, "map file")->required();
    sub->add_option("--out", *out, "output log file")->required();
    sub->add_option("--start", *start, "start pose x,y,theta")->delimiter(',')->expected(3);
    sub->add_option("--goal", *goal, "goal point x,y")->delimiter(',')->expected(2);
    add_seed_option(sub, *seed);
    sub->callback([=, &action] {
      action = [=] {
        opts->finalize();
        OccupancyGrid map = load_map_checked(*map_path);
        Rng rng(*seed);
        Pose s{(*start)[0], (*start)[1], (*start)[2]};
        Pose g{(*goal)[0], (*goal)[1], 0.0};
        save_log(generate_log(map, s, g, opts->cfg, rng), *out);
      };
    });
  }

  // run
  {
    auto* sub = app.add_subcommand("run", "run one filter over a log");
    auto opts = std::make_shared<ModelOptions>();
    opts->attach(sub);
    auto variant_name_arg = std::make_shared<std::string>();
    auto map_path = std::make_shared<std::string>();
    auto log_path = std::make_shared<std::string>();
    auto out_csv = std::make_shared<std::string>();
    auto out_json = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(1);
    sub->add_option("--variant", *variant_name_arg, "mcl | gmcl | ceamcl")->required();
    sub->add_option("--map", *map_path, "map file")->required();
    sub->add_option("--log", *log_path, "log file")->required();
    sub->add_option("--out-csv", *out_csv, "per-step csv (stdout if omitted)");
    sub->add_option("--out-json", *out_json, "summary json (stdout if omitted)");
    add_seed_option(sub, *seed);
    sub->callback([=, &action] {
      action = [=] {
        opts->finalize();
        Variant variant = parse_variant(*variant_name_arg);
        OccupancyGrid map = load_map_checked(*map_path);
        auto log = load_log_checked(*log_path);
        RunMetrics m = run_one(map, log, variant, opts->cfg, *seed);
        emit(metrics_to_csv(m), *out_csv);
        emit(metrics_summary_json({m}), *out_json);
      };
    });
  }

  // compare
  {
    auto* sub = app.add_subcommand("compare", "run all three variants over a seed set");
    auto opts = std::make_shared<ModelOptions>();
    opts->attach(sub);
    auto map_path = std::make_shared<std::string>();
    auto log_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto out_json = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(1);
    auto num_seeds = std::make_shared<int>(10);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--map", *map_path, "map file")->required();
    sub->add_option("--log", *log_path, "log file")->required();
    sub->add_option("--out", *out, "aggregate csv (stdout if omitted)");
    sub->add_option("--out-json", *out_json, "per-variant summary json");
    sub->add_option("--num-seeds", *num_seeds, "seeds per variant")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", *jobs, "worker threads")->check(CLI::PositiveNumber);
    add_seed_option(sub, *seed);
    sub->callback([=, &action] {
      action = [=] {
        opts->finalize();
        OccupancyGrid map = load_map_checked(*map_path);
        auto log = load_log_checked(*log_path);
        auto seeds = seed_range(*seed, *num_seeds);
        std::vector<std::vector<RunMetrics>> by_variant;
        for (Variant v : {Variant::Mcl, Variant::Gmcl, Variant::Ceamcl})
          by_variant.push_back(run_experiment(map, log, v, opts->cfg, seeds, *jobs));
        emit(compare_to_csv(by_variant), *out);
        if (!out_json->empty()) {
          std::string blob;
          for (const auto& runs : by_variant) blob += metrics_summary_json(runs);
          write_text_atomic(blob, *out_json);
        }
      };
    });
  }

  // sweep
  {
    auto* sub = app.add_subcommand("sweep", "sweep a parameter and track sample counts");
    auto opts = std::make_shared<ModelOptions>();
    opts->attach(sub);
    auto map_path = std::make_shared<std::string>();
    auto log_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto param = std::make_shared<std::string>("delta");
    auto values = std::make_shared<std::vector<double>>(std::vector<double>{20, 40, 80, 160});
    auto seed = std::make_shared<std::uint64_t>(1);
    auto num_seeds = std::make_shared<int>(5);
    auto jobs = std::make_shared<int>(1);
    sub->add_option("--map", *map_path, "map file")->required();
    sub->add_option("--log", *log_path, "log file")->required();
    sub->add_option("--out", *out, "long-form csv (stdout if omitted)");
    sub->add_option("--param", *param, "parameter to sweep (delta)");
    sub->add_option("--values", *values, "comma separated values")->delimiter(',');
    sub->add_option("--num-seeds", *num_seeds, "seeds per value")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", *jobs, "worker threads")->check(CLI::PositiveNumber);
    add_seed_option(sub, *seed);
    sub->callback([=, &action] {
      action = [=] {
        opts->finalize();
        if (*param != "delta")
          throw std::invalid_argument("unsupported sweep parameter: " + *param);
        if (values->empty()) throw std::invalid_argument("sweep: --values is empty");
        OccupancyGrid map = load_map_checked(*map_path);
        auto log = load_log_checked(*log_path);
        auto seeds = seed_range(*seed, *num_seeds);
        SweepResult sweep = sweep_delta(map, log, *values, opts->cfg, seeds, *jobs);
        emit(sweep_to_csv(sweep), *out);
      };
    });
  }

  // cost
  {
    auto* sub = app.add_subcommand("cost", "measure per-sample step cost against plain mcl");
    auto opts = std::make_shared<ModelOptions>();
    opts->attach(sub);
    auto map_path = std::make_shared<std::string>();
    auto log_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(1);
    sub->add_option("--map", *map_path, "map file")->required();
    sub->add_option("--log", *log_path, "log file")->required();
    sub->add_option("--out", *out, "report json (stdout if omitted)");
    add_seed_option(sub, *seed);
    sub->callback([=, &action] {
      action = [=] {
        opts->finalize();
        OccupancyGrid map = load_map_checked(*map_path);
        auto log = load_log_checked(*log_path);
        CostReport r = measure_cost(map, log, opts->cfg, *seed);
        nlohmann::json j;
        j["measured_ratio"] = r.measured_ratio;
        j["predicted_exact"] = r.predicted.exact;
        j["predicted_approx"] = r.predicted.approx;
        j["fitted"] = {{"t_f", r.fitted.t_f}, {"t_s", r.fitted.t_s},
                       {"t_r", r.fitted.t_r}, {"t_m", r.fitted.t_m},
                       {"p", r.fitted.p}};
        emit(j.dump(2) + "\n", *out);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    action();
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
