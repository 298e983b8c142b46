#pragma once

#include <array>
#include <vector>

#include "ceamcl/filter_core.hpp"
#include "ceamcl/rng.hpp"
#include "ceamcl/world.hpp"

namespace ceamcl {

// Ellipse in the (x, y) subspace: principal axes from the weighted sample
// covariance, radius 2*sqrt(eigenvalue) along each axis.
struct LivingDomain {
  Pose center;
  std::array<std::array<double, 2>, 2> axes{{{1.0, 0.0}, {0.0, 1.0}}};  // unit, major first
  std::array<double, 2> radii{0.0, 0.0};
  double size = 0.0;  // ellipse area
};

struct DynamicsParams {
  double r = 0.2;        // max growth rate per step
  double delta = 80.0;   // resources per unit domain size
  double epsilon = 0.5;  // domain size floor
};

// Weighted covariance over (x, y), eigendecomposition, radii 2*sqrt(d_j).
// Needs at least two samples.
LivingDomain living_domain(const SampleSet& samples);

// Area of the domain ellipse from the two covariance eigenvalues:
// 2^n * C_n * prod(sqrt(d_j)) with n = 2, C_2 = pi.
double ellipsoid_area(double d1, double d2);

bool domain_contains(const LivingDomain& d, double x, double y);
// Uniform point inside the ellipse.
std::array<double, 2> sample_in_domain(const LivingDomain& d, Rng& rng);
// Ellipse overlap, tested on sampled boundary points and centers.
bool domains_overlap(const LivingDomain& a, const LivingDomain& b);

// delta * size with the floor: domains smaller than epsilon still provide
// delta * epsilon.
double resources(double domain_size, const DynamicsParams& params);

// K = exp(1 - fitness) * total_resources.
double carrying_capacity(double fitness, double total_resources);

// alpha[i][j] = fitness_j / fitness_i.
std::vector<std::vector<double>> competition_matrix(const std::vector<double>& fitness);

// Lotka-Volterra increments:
// dN_i = r * N_i * (1 - (N_i + sum_{j != i} alpha[i][j] N_j) / K_i).
std::vector<double> growth_rates(const std::vector<double>& populations,
                                 const std::vector<double>& capacities,
                                 const std::vector<std::vector<double>>& alpha,
                                 double r);

enum class Equilibrium { Species1Wins, Species2Wins, Bistable, Coexist };

struct EquilibriumResult {
  Equilibrium outcome = Equilibrium::Coexist;
  bool degenerate = false;  // some boundary condition held with equality
};

// Two-species outcome from the isocline conditions on K1, K2, alpha12, alpha21.
EquilibriumResult classify_equilibrium(double k1, double k2, double alpha12,
                                       double alpha21);

}  // namespace ceamcl
