#include "ceamcl/species.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace ceamcl {

GridSpec GridSpec::over_map(const OccupancyGrid& map, int nx, int ny) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("GridSpec: bad dimensions");
  GridSpec s;
  s.nx = nx;
  s.ny = ny;
  s.x0 = map.origin_x;
  s.y0 = map.origin_y;
  s.cell_w = map.side_x() / nx;
  s.cell_h = map.side_y() / ny;
  return s;
}

int GridSpec::cell_of(double x, double y) const {
  int ix = static_cast<int>(std::floor((x - x0) / cell_w));
  int iy = static_cast<int>(std::floor((y - y0) / cell_h));
  ix = std::clamp(ix, 0, nx - 1);
  iy = std::clamp(iy, 0, ny - 1);
  return iy * nx + ix;
}

SampleSet draw_test_set(const OccupancyGrid& map, const ScanObservation& y0,
                        int n_test, const NoiseParams& noise, Rng& rng) {
  if (n_test <= 0) throw std::invalid_argument("draw_test_set: n_test must be positive");
  SampleSet out;
  out.samples.reserve(n_test);
  double w = map.side_x(), h = map.side_y();
  for (int k = 0; k < n_test; ++k) {
    Pose p;
    do {
      p.x = map.origin_x + rng.uniform() * w;
      p.y = map.origin_y + rng.uniform() * h;
    } while (map.occupied_at(p.x, p.y));
    p.theta = rng.uniform(-kPi, kPi);
    out.samples.push_back({p, likelihood(y0, p, map, noise)});
  }
  return out;
}

GridPartition threshold_grids(const SampleSet& test, const GridSpec& spec,
                              double mu) {
  if (!(mu > 0.0) || mu >= 1.0)
    throw std::invalid_argument("threshold_grids: mu must be in (0, 1)");
  GridPartition part;
  part.spec = spec;
  int n = spec.cell_count();
  part.avg_weight.assign(n, 0.0);
  part.in_v.assign(n, 0);
  part.zone.assign(n, -1);

  std::vector<int> count(n, 0);
  for (const auto& s : test.samples) {
    int c = spec.cell_of(s.pose.x, s.pose.y);
    part.avg_weight[c] += s.weight;
    count[c]++;
  }
  double max_avg = 0.0;
  for (int c = 0; c < n; ++c) {
    if (count[c] > 0) part.avg_weight[c] /= count[c];
    max_avg = std::max(max_avg, part.avg_weight[c]);
  }
  part.threshold = mu * max_avg;
  for (int c = 0; c < n; ++c)
    part.in_v[c] = (count[c] > 0 && part.avg_weight[c] > part.threshold) ? 1 : 0;
  return part;
}

int initial_sample_size(const GridPartition& part, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("initial_sample_size: eta must be positive");
  int v_count = 0;
  double sum = 0.0;
  for (int c = 0; c < part.spec.cell_count(); ++c) {
    if (part.in_v[c]) {
      v_count++;
      sum += part.avg_weight[c];
    }
  }
  if (v_count == 0)
    throw std::runtime_error("initial_sample_size: the observation matched nowhere on the map");
  double mean = sum / v_count;
  return static_cast<int>(std::ceil(eta * v_count / mean));
}

GridPartition skiz_partition(GridPartition part) {
  const GridSpec& spec = part.spec;
  int n = spec.cell_count();
  std::fill(part.zone.begin(), part.zone.end(), -1);

  // label seeds: connected regions of V, row-major discovery order
  int zones = 0;
  std::deque<int> queue;
  for (int start = 0; start < n; ++start) {
    if (!part.in_v[start] || part.zone[start] >= 0) continue;
    int id = zones++;
    part.zone[start] = id;
    std::deque<int> stack{start};
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      int cx = c % spec.nx, cy = c / spec.nx;
      const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        int mx = cx + dx[d], my = cy + dy[d];
        if (mx < 0 || my < 0 || mx >= spec.nx || my >= spec.ny) continue;
        int m = my * spec.nx + mx;
        if (part.in_v[m] && part.zone[m] < 0) {
          part.zone[m] = id;
          stack.push_back(m);
        }
      }
    }
  }
  part.zone_count = zones;
  if (zones == 0) return part;

  // grow zones by multi-source BFS; city-block metric, FIFO order with seeds
  // enqueued by ascending id resolves distance ties toward the lower id
  for (int c = 0; c < n; ++c)
    if (part.zone[c] >= 0) queue.push_back(c);
  std::sort(queue.begin(), queue.end(),
            [&](int a, int b) { return part.zone[a] < part.zone[b]; });
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    int cx = c % spec.nx, cy = c / spec.nx;
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int mx = cx + dx[d], my = cy + dy[d];
      if (mx < 0 || my < 0 || mx >= spec.nx || my >= spec.ny) continue;
      int m = my * spec.nx + mx;
      if (part.zone[m] < 0) {
        part.zone[m] = part.zone[c];
        queue.push_back(m);
      }
    }
  }
  return part;
}

std::vector<Species> allocate_and_select(const GridPartition& part,
                                         const SampleSet& test, int n0) {
  if (n0 <= 0) throw std::invalid_argument("allocate_and_select: n0 must be positive");
  if (part.zone_count <= 0)
    throw std::runtime_error("allocate_and_select: no influence zones");
  int zones = part.zone_count;

  // mean V-grid weight per zone (the zone's seed region)
  std::vector<double> w(zones, 0.0);
  std::vector<int> v_count(zones, 0);
  for (int c = 0; c < part.spec.cell_count(); ++c) {
    if (part.in_v[c]) {
      w[part.zone[c]] += part.avg_weight[c];
      v_count[part.zone[c]]++;
    }
  }
  double w_sum = 0.0;
  for (int k = 0; k < zones; ++k) {
    if (v_count[k] > 0) w[k] /= v_count[k];
    w_sum += w[k];
  }
  if (!(w_sum > 0.0)) throw std::runtime_error("allocate_and_select: zero zone weights");

  // largest-remainder quotas summing exactly to n0
  std::vector<int> quota(zones, 0);
  std::vector<std::pair<double, int>> rem(zones);
  int used = 0;
  for (int k = 0; k < zones; ++k) {
    double ideal = n0 * w[k] / w_sum;
    quota[k] = static_cast<int>(std::floor(ideal));
    rem[k] = {ideal - quota[k], k};
    used += quota[k];
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  for (int k = 0; k < n0 - used; ++k) quota[rem[k].second]++;

  // test sample indices per zone
  std::vector<std::vector<int>> members(zones);
  for (std::size_t i = 0; i < test.samples.size(); ++i) {
    int z = part.zone[part.spec.cell_of(test.samples[i].pose.x, test.samples[i].pose.y)];
    if (z >= 0) members[z].push_back(static_cast<int>(i));
  }

  std::vector<Species> out;
  for (int k = 0; k < zones; ++k) {
    if (quota[k] <= 0 || members[k].empty()) continue;
    auto& idx = members[k];
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      return test.samples[a].weight > test.samples[b].weight;
    });
    int take = std::min<int>(quota[k], static_cast<int>(idx.size()));
    Species sp;
    sp.id = k;
    sp.samples.samples.reserve(take);
    for (int i = 0; i < take; ++i) sp.samples.samples.push_back(test.samples[idx[i]]);
    sp.population = take;
    sp.fitness = std::clamp(sp.samples.mean_weight(), 1e-300, 1.0);
    out.push_back(std::move(sp));
  }
  if (out.empty()) throw std::runtime_error("allocate_and_select: no species materialized");
  return out;
}

namespace {

LivingDomain domain_of(const SampleSet& samples) {
  if (samples.size() >= 2) return living_domain(samples);
  LivingDomain d;
  d.center = samples.samples.empty() ? Pose{} : samples.samples[0].pose;
  d.radii = {1e-6, 1e-6};
  d.size = 0.0;
  return d;
}

void refresh(Species& sp) {
  sp.fitness = std::clamp(sp.samples.mean_weight(), 1e-300, 1.0);
  sp.domain = domain_of(sp.samples);
}

// weight of the nearest sample (x, y distance) to a point
double nearest_weight(const Species& a, const Species& b, double x, double y) {
  double best_d = -1.0, best_w = 0.0;
  for (const Species* sp : {&a, &b}) {
    for (const auto& s : sp->samples.samples) {
      double dx = s.pose.x - x, dy = s.pose.y - y;
      double d = dx * dx + dy * dy;
      if (best_d < 0.0 || d < best_d) {
        best_d = d;
        best_w = s.weight;
      }
    }
  }
  return best_w;
}

bool should_merge(const Species& a, const Species& b) {
  if (!domains_overlap(a.domain, b.domain)) return false;
  double min_w = -1.0;
  for (int k = 0; k < 10; ++k) {
    double t = k / 9.0;
    double x = a.domain.center.x + t * (b.domain.center.x - a.domain.center.x);
    double y = a.domain.center.y + t * (b.domain.center.y - a.domain.center.y);
    double w = nearest_weight(a, b, x, y);
    if (min_w < 0.0 || w < min_w) min_w = w;
  }
  return min_w >= 0.5 * std::min(a.fitness, b.fitness);
}

}  // namespace

std::vector<Species> split_merge(std::vector<Species> list, const GridSpec& spec,
                                 int& next_id, int min_fragment) {
  if (min_fragment < 1) min_fragment = 1;
  // split: one species per connected component of its occupied grid cells;
  // components too small to stand alone join the nearest viable one
  std::vector<Species> split_out;
  for (auto& sp : list) {
    std::vector<int> cell(sp.samples.size());
    std::vector<int> comp_of_cell(spec.cell_count(), -1);
    for (int i = 0; i < sp.samples.size(); ++i) {
      cell[i] = spec.cell_of(sp.samples.samples[i].pose.x, sp.samples.samples[i].pose.y);
      comp_of_cell[cell[i]] = 0;  // mark occupied
    }
    int comps = 0;
    for (int start = 0; start < spec.cell_count(); ++start) {
      if (comp_of_cell[start] != 0) continue;
      ++comps;
      comp_of_cell[start] = comps;
      std::vector<int> stack{start};
      while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        int cx = c % spec.nx, cy = c / spec.nx;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int mx = cx + dx[d], my = cy + dy[d];
          if (mx < 0 || my < 0 || mx >= spec.nx || my >= spec.ny) continue;
          int m = my * spec.nx + mx;
          if (comp_of_cell[m] == 0) {
            comp_of_cell[m] = comps;
            stack.push_back(m);
          }
        }
      }
    }

    std::vector<std::vector<int>> groups(comps);
    for (int i = 0; i < sp.samples.size(); ++i)
      groups[comp_of_cell[cell[i]] - 1].push_back(i);

    std::vector<int> viable;
    for (int g = 0; g < comps; ++g)
      if (static_cast<int>(groups[g].size()) >= min_fragment) viable.push_back(g);

    if (viable.size() <= 1) {
      refresh(sp);
      split_out.push_back(std::move(sp));
      continue;
    }

    auto centroid = [&](const std::vector<int>& idx) {
      double cx = 0.0, cy = 0.0;
      for (int i : idx) {
        cx += sp.samples.samples[i].pose.x;
        cy += sp.samples.samples[i].pose.y;
      }
      return std::pair{cx / idx.size(), cy / idx.size()};
    };
    std::vector<std::pair<double, double>> viable_at;
    for (int g : viable) viable_at.push_back(centroid(groups[g]));
    for (int g = 0; g < comps; ++g) {
      if (static_cast<int>(groups[g].size()) >= min_fragment || groups[g].empty()) continue;
      auto [cx, cy] = centroid(groups[g]);
      int best = 0;
      double best_d = -1.0;
      for (std::size_t k = 0; k < viable.size(); ++k) {
        double dx = viable_at[k].first - cx, dy = viable_at[k].second - cy;
        double d = dx * dx + dy * dy;
        if (best_d < 0.0 || d < best_d) {
          best_d = d;
          best = static_cast<int>(k);
        }
      }
      auto& host = groups[viable[best]];
      host.insert(host.end(), groups[g].begin(), groups[g].end());
    }

    int total = sp.samples.size();
    for (int g : viable) {
      Species frag;
      frag.id = next_id++;
      frag.samples.samples.reserve(groups[g].size());
      for (int i : groups[g]) frag.samples.samples.push_back(sp.samples.samples[i]);
      frag.population = sp.population * frag.samples.size() / total;
      frag.growth_rate_cached = 0.0;
      refresh(frag);
      split_out.push_back(std::move(frag));
    }
  }

  // merge overlapping species without a weight valley between them
  std::sort(split_out.begin(), split_out.end(),
            [](const Species& a, const Species& b) { return a.id < b.id; });
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < split_out.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < split_out.size() && !merged; ++j) {
        if (!should_merge(split_out[i], split_out[j])) continue;
        Species& keep = split_out[i];  // lower id
        Species& gone = split_out[j];
        keep.samples.samples.insert(keep.samples.samples.end(),
                                    gone.samples.samples.begin(),
                                    gone.samples.samples.end());
        keep.population += gone.population;
        refresh(keep);
        split_out.erase(split_out.begin() + j);
        merged = true;
      }
    }
  }
  return split_out;
}

}  // namespace ceamcl
