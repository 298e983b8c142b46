#include "ceamcl/coevolution.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ceamcl {

namespace {
constexpr double kVarFloor = 1e-12;
}

double ellipsoid_area(double d1, double d2) {
  // 2^n * C_n * prod sqrt(d_j), n = 2, C_2 = pi
  return 4.0 * kPi * std::sqrt(d1 * d2);
}

LivingDomain living_domain(const SampleSet& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("living_domain: needs at least two samples");
  double total = samples.total_weight();
  bool uniform = !(total > 0.0);
  double n = static_cast<double>(samples.size());

  double mx = 0.0, my = 0.0, sc = 0.0, ss = 0.0;
  for (const auto& s : samples.samples) {
    double w = uniform ? 1.0 / n : s.weight / total;
    mx += w * s.pose.x;
    my += w * s.pose.y;
    sc += w * std::cos(s.pose.theta);
    ss += w * std::sin(s.pose.theta);
  }

  double qxx = 0.0, qxy = 0.0, qyy = 0.0;
  for (const auto& s : samples.samples) {
    double w = uniform ? 1.0 / n : s.weight / total;
    double dx = s.pose.x - mx, dy = s.pose.y - my;
    qxx += w * dx * dx;
    qxy += w * dx * dy;
    qyy += w * dy * dy;
  }

  Eigen::Matrix2d q;
  q << qxx, qxy, qxy, qyy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(q);
  // eigenvalues come back ascending; report major axis first
  double d_major = std::max(eig.eigenvalues()[1], kVarFloor);
  double d_minor = std::max(eig.eigenvalues()[0], kVarFloor);
  Eigen::Vector2d v_major = eig.eigenvectors().col(1);
  Eigen::Vector2d v_minor = eig.eigenvectors().col(0);

  LivingDomain d;
  d.center = Pose{mx, my, wrap_angle(std::atan2(ss, sc))};
  d.axes = {{{v_major.x(), v_major.y()}, {v_minor.x(), v_minor.y()}}};
  d.radii = {2.0 * std::sqrt(d_major), 2.0 * std::sqrt(d_minor)};
  d.size = ellipsoid_area(d_major, d_minor);
  return d;
}

bool domain_contains(const LivingDomain& d, double x, double y) {
  double dx = x - d.center.x, dy = y - d.center.y;
  double sum = 0.0;
  for (int j = 0; j < 2; ++j) {
    double proj = dx * d.axes[j][0] + dy * d.axes[j][1];
    double r = std::max(d.radii[j], 1e-9);
    sum += (proj / r) * (proj / r);
  }
  return sum <= 1.0;
}

std::array<double, 2> sample_in_domain(const LivingDomain& d, Rng& rng) {
  double rho = std::sqrt(rng.uniform());
  double phi = rng.uniform(-kPi, kPi);
  double a = rho * std::cos(phi) * d.radii[0];
  double b = rho * std::sin(phi) * d.radii[1];
  return {d.center.x + a * d.axes[0][0] + b * d.axes[1][0],
          d.center.y + a * d.axes[0][1] + b * d.axes[1][1]};
}

bool domains_overlap(const LivingDomain& a, const LivingDomain& b) {
  if (domain_contains(b, a.center.x, a.center.y)) return true;
  if (domain_contains(a, b.center.x, b.center.y)) return true;
  const int k = 64;
  for (int i = 0; i < k; ++i) {
    double phi = 2.0 * kPi * i / k;
    double ca = std::cos(phi), sa = std::sin(phi);
    double ax = a.center.x + ca * a.radii[0] * a.axes[0][0] + sa * a.radii[1] * a.axes[1][0];
    double ay = a.center.y + ca * a.radii[0] * a.axes[0][1] + sa * a.radii[1] * a.axes[1][1];
    if (domain_contains(b, ax, ay)) return true;
    double bx = b.center.x + ca * b.radii[0] * b.axes[0][0] + sa * b.radii[1] * b.axes[1][0];
    double by = b.center.y + ca * b.radii[0] * b.axes[0][1] + sa * b.radii[1] * b.axes[1][1];
    if (domain_contains(a, bx, by)) return true;
  }
  return false;
}

double resources(double domain_size, const DynamicsParams& params) {
  if (domain_size < 0.0) throw std::invalid_argument("resources: negative domain size");
  return params.delta * (domain_size > params.epsilon ? domain_size : params.epsilon);
}

double carrying_capacity(double fitness, double total_resources) {
  if (!(fitness > 0.0) || fitness > 1.0)
    throw std::invalid_argument("carrying_capacity: fitness must be in (0, 1]");
  if (total_resources < 0.0)
    throw std::invalid_argument("carrying_capacity: negative resources");
  return std::exp(1.0 - fitness) * total_resources;
}

std::vector<std::vector<double>> competition_matrix(const std::vector<double>& fitness) {
  for (double f : fitness)
    if (!(f > 0.0)) throw std::invalid_argument("competition_matrix: fitness must be positive");
  std::size_t n = fitness.size();
  std::vector<std::vector<double>> alpha(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) alpha[i][j] = fitness[j] / fitness[i];
  return alpha;
}

std::vector<double> growth_rates(const std::vector<double>& populations,
                                 const std::vector<double>& capacities,
                                 const std::vector<std::vector<double>>& alpha,
                                 double r) {
  std::size_t n = populations.size();
  if (capacities.size() != n || alpha.size() != n)
    throw std::invalid_argument("growth_rates: size mismatch");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(capacities[i] > 0.0)) throw std::invalid_argument("growth_rates: capacity must be positive");
    double load = populations[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) load += alpha[i][j] * populations[j];
    d[i] = r * populations[i] * (1.0 - load / capacities[i]);
  }
  return d;
}

EquilibriumResult classify_equilibrium(double k1, double k2, double alpha12,
                                       double alpha21) {
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(alpha12 > 0.0) || !(alpha21 > 0.0))
    throw std::invalid_argument("classify_equilibrium: inputs must be positive");
  double c1 = k2 / alpha21;  // against k1
  double c2 = k1 / alpha12;  // against k2
  EquilibriumResult res;
  if (c1 == k1 || c2 == k2) {
    res.outcome = Equilibrium::Coexist;
    res.degenerate = true;
    return res;
  }
  bool low1 = c1 < k1;  // species 2's isocline sits inside species 1's capacity
  bool low2 = c2 < k2;
  if (low1 && !low2) res.outcome = Equilibrium::Species1Wins;
  else if (!low1 && low2) res.outcome = Equilibrium::Species2Wins;
  else if (low1 && low2) res.outcome = Equilibrium::Bistable;
  else res.outcome = Equilibrium::Coexist;
  return res;
}

}  // namespace ceamcl
