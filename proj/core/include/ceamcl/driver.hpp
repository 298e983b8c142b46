#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ceamcl/coevolution.hpp"
#include "ceamcl/evolution.hpp"
#include "ceamcl/filter_core.hpp"
#include "ceamcl/models.hpp"
#include "ceamcl/species.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

enum class Variant { Mcl, Gmcl, Ceamcl };

Variant parse_variant(const std::string& name);  // "mcl" | "gmcl" | "ceamcl"
const char* variant_name(Variant v);

struct RunConfig {
  NoiseParams noise;
  DynamicsParams dynamics;
  EvolutionParams evolution;
  int grid_nx = 150, grid_ny = 150;  // clustering grid
  double mu = 0.85;                  // grid threshold factor
  double eta = 2.0;                  // initial samples per unit of V
  int n_test = 100000;
  int fixed_n = 500;                 // MCL / GMCL sample count
  int beams = 64;
  double scan_max_range = 4.0;
  int min_species_samples = 3;
  // harness
  double step_len = 0.3;
  double association_radius = 1.0;
  double convergence_mass = 0.9;
  int symmetry_order = 4;  // rotational ghost hypotheses on the benchmark map
};

struct FilterState {
  Variant variant = Variant::Mcl;
  const OccupancyGrid* map = nullptr;
  std::vector<Species> species;
  int t = 0;
  double total_resources = 0.0;
  RunConfig config;
  std::uint64_t seed = 0;
  int next_species_id = 0;

  int total_samples() const;
  const Species& best_species() const;  // argmax fitness, ties to lower id
  PoseSummary estimate() const;
};

// CEAMCL: species from the initial observation (test set -> thresholded
// grids -> skiz zones -> per-zone selection). MCL/GMCL: one species of
// fixed_n uniform samples.
FilterState init(Variant variant, const OccupancyGrid& map,
                 const ScanObservation& y0, const RunConfig& config,
                 std::uint64_t seed);

void step_mcl(FilterState& state, const OdometryControl& u, const ScanObservation& y);
void step_gmcl(FilterState& state, const OdometryControl& u, const ScanObservation& y);
// Per species: grow/shrink by the cached Lotka-Volterra increment (growth
// injects fresh samples from the living domain), resample, importance step,
// evolve, then split/merge and refresh the dynamics quantities.
void step_ceamcl(FilterState& state, const OdometryControl& u, const ScanObservation& y);
void step(FilterState& state, const OdometryControl& u, const ScanObservation& y);

struct CostModel {
  double t_f = 0.0;  // per-sample likelihood evaluation
  double t_s = 0.0;  // per-sample motion draw
  double t_r = 0.0;  // per-sample resample/bookkeeping
  double t_m = 0.0;  // per-sample split-merge
  double p = 0.0;    // p_c + p_m
};

struct CostRatio {
  double exact = 0.0;
  double approx = 0.0;  // (1 + p) * n_c / n_m
};

CostRatio predict_cost_ratio(const CostModel& model, int n_c, int n_m);

}  // namespace ceamcl
