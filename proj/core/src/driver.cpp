#include "ceamcl/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ceamcl/perf.hpp"

namespace ceamcl {

namespace {

enum Phase : std::uint64_t {
  kPhaseInit = 1,
  kPhaseResample = 2,
  kPhaseImportance = 3,
  kPhaseEvolve = 4,
  kPhaseInject = 5,
};

Rng phase_rng(const FilterState& state, int t, Phase phase, int species_id) {
  return Rng(mix_seed({state.seed, static_cast<std::uint64_t>(t), phase,
                       static_cast<std::uint64_t>(species_id)}));
}

Pose uniform_free_pose(const OccupancyGrid& map, Rng& rng) {
  Pose p;
  do {
    p.x = map.origin_x + rng.uniform() * map.side_x();
    p.y = map.origin_y + rng.uniform() * map.side_y();
  } while (map.occupied_at(p.x, p.y));
  p.theta = rng.uniform(-kPi, kPi);
  return p;
}

// Pad a too-small species by cloning its best samples, keeping raw weights.
void enforce_sample_floor(Species& sp, int floor_n) {
  if (sp.samples.size() >= floor_n) return;
  if (sp.samples.empty()) throw std::runtime_error("species with no samples");
  std::vector<WeightedSample> by_weight = sp.samples.samples;
  std::stable_sort(by_weight.begin(), by_weight.end(),
                   [](const WeightedSample& a, const WeightedSample& b) {
                     return a.weight > b.weight;
                   });
  std::size_t i = 0;
  while (sp.samples.size() < floor_n)
    sp.samples.samples.push_back(by_weight[i++ % by_weight.size()]);
  sp.population = std::max(sp.population, static_cast<double>(floor_n));
}

// fitness, domains, resources, capacities, competition, cached increments
void refresh_dynamics(FilterState& state) {
  double r_total = 0.0;
  for (auto& sp : state.species) {
    sp.fitness = std::clamp(sp.samples.mean_weight(), 1e-300, 1.0);
    sp.domain = living_domain(sp.samples);
    r_total += resources(sp.domain.size, state.config.dynamics);
  }
  state.total_resources = r_total;

  std::vector<double> fitness, populations, capacities;
  for (auto& sp : state.species) {
    sp.capacity = carrying_capacity(sp.fitness, r_total);
    fitness.push_back(sp.fitness);
    populations.push_back(sp.population);
    capacities.push_back(sp.capacity);
  }
  auto alpha = competition_matrix(fitness);
  auto d = growth_rates(populations, capacities, alpha, state.config.dynamics.r);
  for (std::size_t i = 0; i < state.species.size(); ++i)
    state.species[i].growth_rate_cached = d[i];
}

void normalize_species(FilterState& state) {
  for (auto& sp : state.species) sp.samples = normalize(std::move(sp.samples));
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "mcl") return Variant::Mcl;
  if (name == "gmcl") return Variant::Gmcl;
  if (name == "ceamcl") return Variant::Ceamcl;
  throw std::invalid_argument("unknown variant: " + name);
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Mcl: return "mcl";
    case Variant::Gmcl: return "gmcl";
    default: return "ceamcl";
  }
}

int FilterState::total_samples() const {
  int n = 0;
  for (const auto& sp : species) n += sp.samples.size();
  return n;
}

const Species& FilterState::best_species() const {
  if (species.empty()) throw std::runtime_error("no species");
  const Species* best = &species[0];
  for (const auto& sp : species)
    if (sp.fitness > best->fitness || (sp.fitness == best->fitness && sp.id < best->id))
      best = &sp;
  return *best;
}

PoseSummary FilterState::estimate() const { return summarize(best_species().samples); }

FilterState init(Variant variant, const OccupancyGrid& map,
                 const ScanObservation& y0, const RunConfig& config,
                 std::uint64_t seed) {
  FilterState state;
  state.variant = variant;
  state.map = &map;
  state.config = config;
  state.seed = seed;
  state.t = 0;

  Rng rng = phase_rng(state, 0, kPhaseInit, 0);
  if (variant == Variant::Ceamcl) {
    SampleSet test = draw_test_set(map, y0, config.n_test, config.noise, rng);
    GridSpec spec = GridSpec::over_map(map, config.grid_nx, config.grid_ny);
    GridPartition part = threshold_grids(test, spec, config.mu);
    int n0 = initial_sample_size(part, config.eta);
    part = skiz_partition(std::move(part));
    state.species = allocate_and_select(part, test, n0);
    state.next_species_id = 0;
    for (auto& sp : state.species) {
      state.next_species_id = std::max(state.next_species_id, sp.id + 1);
      sp.growth_rate_cached = 0.0;
    }
    for (auto& sp : state.species)
      enforce_sample_floor(sp, config.min_species_samples);
    refresh_dynamics(state);
    // initial increments stay zero; dynamics start acting on the next step
    for (auto& sp : state.species) sp.growth_rate_cached = 0.0;
  } else {
    Species sp;
    sp.id = 0;
    sp.samples.samples.reserve(config.fixed_n);
    for (int i = 0; i < config.fixed_n; ++i)
      sp.samples.samples.push_back({uniform_free_pose(map, rng), 1.0});
    sp.population = config.fixed_n;
    sp.fitness = 1.0;
    state.species.push_back(std::move(sp));
    state.next_species_id = 1;
  }
  normalize_species(state);
  return state;
}

void step_mcl(FilterState& state, const OdometryControl& u, const ScanObservation& y) {
  int t = state.t + 1;
  Species& sp = state.species[0];
  Rng r1 = phase_rng(state, t, kPhaseResample, sp.id);
  sp.samples = resample(sp.samples, state.config.fixed_n, r1);
  Rng r2 = phase_rng(state, t, kPhaseImportance, sp.id);
  sp.samples = importance_step(sp.samples, u, y, *state.map, state.config.noise, r2);
  sp.fitness = std::clamp(sp.samples.mean_weight(), 1e-300, 1.0);
  sp.samples = normalize(std::move(sp.samples));
  state.t = t;
}

void step_gmcl(FilterState& state, const OdometryControl& u, const ScanObservation& y) {
  int t = state.t + 1;
  Species& sp = state.species[0];
  Rng r1 = phase_rng(state, t, kPhaseResample, sp.id);
  sp.samples = resample(sp.samples, state.config.fixed_n, r1);
  Rng r2 = phase_rng(state, t, kPhaseImportance, sp.id);
  sp.samples = importance_step(sp.samples, u, y, *state.map, state.config.noise, r2);
  Rng r3 = phase_rng(state, t, kPhaseEvolve, sp.id);
  evolve_samples(sp.samples, y, *state.map, state.config.noise, state.config.evolution, r3);
  sp.fitness = std::clamp(sp.samples.mean_weight(), 1e-300, 1.0);
  sp.samples = normalize(std::move(sp.samples));
  state.t = t;
}

void step_ceamcl(FilterState& state, const OdometryControl& u, const ScanObservation& y) {
  int t = state.t + 1;
  const RunConfig& cfg = state.config;

  // population update from the cached increments; growth injects fresh
  // samples from the living domain before resampling
  std::vector<Species> alive;
  for (auto& sp : state.species) {
    double dn = sp.growth_rate_cached;
    if (dn > 0.0) {
      int inject = static_cast<int>(std::llround(dn));
      if (inject > 0) {
        Rng rng = phase_rng(state, t, kPhaseInject, sp.id);
        double w = sp.samples.mean_weight();
        for (int k = 0; k < inject; ++k) {
          auto [x, yy] = sample_in_domain(sp.domain, rng);
          sp.samples.samples.push_back({Pose{x, yy, rng.uniform(-kPi, kPi)}, w});
        }
      }
    }
    double n_next = std::max(sp.population + dn, 0.0);
    if (std::llround(n_next) == 0) continue;  // extinct
    sp.population = std::max(n_next, static_cast<double>(cfg.min_species_samples));
    alive.push_back(std::move(sp));
  }
  state.species = std::move(alive);
  if (state.species.empty())
    throw std::runtime_error("step_ceamcl: every species went extinct");

  for (auto& sp : state.species) {
    Rng r1 = phase_rng(state, t, kPhaseResample, sp.id);
    int n = static_cast<int>(std::llround(sp.population));
    sp.samples = resample(normalize(std::move(sp.samples)), n, r1);
    Rng r2 = phase_rng(state, t, kPhaseImportance, sp.id);
    sp.samples = importance_step(sp.samples, u, y, *state.map, cfg.noise, r2);
    Rng r3 = phase_rng(state, t, kPhaseEvolve, sp.id);
    evolve_samples(sp.samples, y, *state.map, cfg.noise, cfg.evolution, r3);
  }

  auto sm_start = std::chrono::steady_clock::now();
  GridSpec spec = GridSpec::over_map(*state.map, cfg.grid_nx, cfg.grid_ny);
  state.species = split_merge(std::move(state.species), spec, state.next_species_id,
                              cfg.min_species_samples);
  perf().split_merge_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - sm_start).count();

  for (auto& sp : state.species)
    enforce_sample_floor(sp, cfg.min_species_samples);

  refresh_dynamics(state);
  normalize_species(state);
  state.t = t;
}

void step(FilterState& state, const OdometryControl& u, const ScanObservation& y) {
  switch (state.variant) {
    case Variant::Mcl: step_mcl(state, u, y); break;
    case Variant::Gmcl: step_gmcl(state, u, y); break;
    case Variant::Ceamcl: step_ceamcl(state, u, y); break;
  }
}

CostRatio predict_cost_ratio(const CostModel& model, int n_c, int n_m) {
  if (n_c <= 0 || n_m <= 0) throw std::invalid_argument("predict_cost_ratio: bad sample counts");
  double t_m_step = n_m * (model.t_f + model.t_s + model.t_r);
  double t_c_step = n_c * ((1.0 + model.p) * model.t_f + 2.0 * model.t_s + model.t_r + model.t_m);
  CostRatio out;
  out.exact = t_c_step / t_m_step;
  out.approx = (1.0 + model.p) * static_cast<double>(n_c) / n_m;
  return out;
}

}  // namespace ceamcl
