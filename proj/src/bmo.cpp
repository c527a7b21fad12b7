#include "hfrac/bmo.hpp"

#include <cmath>
#include <random>

namespace hfrac {

BallFamily BallFamily::lattice(int n, double span, double span_t, int per_axis, int j_min,
                               int j_max) {
  if (per_axis < 1 || j_min > j_max) throw std::invalid_argument("BallFamily: bad parameters");
  BallFamily fam;
  const int na = 2 * n + 1;
  std::vector<int> idx(na, 0);
  const auto coord = [per_axis](int i, double s) {
    return per_axis == 1 ? 0.0 : -s + 2.0 * s * i / (per_axis - 1);
  };
  std::size_t total = 1;
  for (int k = 0; k < na; ++k) total *= per_axis;
  for (std::size_t c = 0; c < total; ++c) {
    HeisenbergPoint center = HeisenbergPoint::identity(n);
    for (int i = 0; i < n; ++i) center.x(i) = coord(idx[i], span);
    for (int i = 0; i < n; ++i) center.y(i) = coord(idx[n + i], span);
    center.t = coord(idx[2 * n], span_t);
    for (int j = j_min; j <= j_max; ++j) {
      fam.balls.push_back({center, std::pow(2.0, -j)});
    }
    for (int k = na - 1; k >= 0; --k) {
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
    }
  }
  return fam;
}

namespace {

// squared-gauge test without allocations: ||c^{-1} p||^4 <= r^4
double gauge4_from(const double* c, const double* p, int n) {
  double z2 = 0.0;
  double tpart = p[2 * n] - c[2 * n];
  for (int m = 0; m < n; ++m) {
    const double dx = p[m] - c[m];
    const double dy = p[n + m] - c[n + m];
    z2 += dx * dx + dy * dy;
    tpart += 0.5 * (c[n + m] * p[m] - c[m] * p[n + m]);
  }
  return z2 * z2 + 16.0 * tpart * tpart;
}

std::vector<double> cell_coords(const GridSpec& spec) {
  const int na = spec.num_axes();
  std::vector<double> coords(spec.total_cells() * na);
  std::vector<int> idx(na, 0);
  for (std::size_t flat = 0; flat < spec.total_cells(); ++flat) {
    for (int a = 0; a < na; ++a) coords[flat * na + a] = spec.axes[a].center(idx[a]);
    for (int a = na - 1; a >= 0; --a) {
      if (++idx[a] < spec.axes[a].count) break;
      idx[a] = 0;
    }
  }
  return coords;
}

void center_coords(const KoranyiBall& b, int n, double* c) {
  for (int i = 0; i < n; ++i) c[i] = b.center.x(i);
  for (int i = 0; i < n; ++i) c[n + i] = b.center.y(i);
  c[2 * n] = b.center.t;
}

}  // namespace

BallFamily BallFamily::lattice_for_grid(const GridSpec& spec, int per_axis, int j_min, int j_max,
                                        int min_cells) {
  const int n = spec.n;
  double span = 0.0, span_t = 0.0;
  for (int k = 0; k < 2 * n; ++k) span = std::max(span, 0.5 * spec.axes[k].length());
  span_t = 0.5 * spec.vertical().length();
  BallFamily all = lattice(n, 0.5 * span, 0.5 * span_t, per_axis, j_min, j_max);

  const auto coords = cell_coords(spec);
  const int na = spec.num_axes();
  BallFamily kept;
  double c[15];
  for (const auto& b : all.balls) {
    center_coords(b, n, c);
    const double r4 = std::pow(b.radius, 4.0);
    int count = 0;
    for (std::size_t flat = 0; flat < spec.total_cells(); ++flat) {
      if (gauge4_from(c, &coords[flat * na], n) <= r4) ++count;
      if (count >= min_cells) break;
    }
    if (count >= min_cells) kept.balls.push_back(b);
  }
  return kept;
}

double bmo_norm(const GridField& f, const BallFamily& balls, int min_cells) {
  if (balls.balls.empty()) throw std::invalid_argument("bmo_norm: empty ball family");
  const auto& spec = f.spec;
  const int n = spec.n;
  const int na = spec.num_axes();
  const auto coords = cell_coords(spec);
  double worst = 0.0;
  double c[15];
  std::vector<std::size_t> members;
  for (const auto& b : balls.balls) {
    center_coords(b, n, c);
    const double r4 = std::pow(b.radius, 4.0);
    members.clear();
    for (std::size_t flat = 0; flat < spec.total_cells(); ++flat) {
      if (gauge4_from(c, &coords[flat * na], n) <= r4) members.push_back(flat);
    }
    if (static_cast<int>(members.size()) < min_cells) {
      throw std::invalid_argument("bmo_norm: unresolved ball (radius " + std::to_string(b.radius) +
                                  ", " + std::to_string(members.size()) + " cells)");
    }
    double mean = 0.0;
    for (auto m : members) mean += f.values[m].real();
    mean /= static_cast<double>(members.size());
    double osc = 0.0;
    for (auto m : members) osc += std::abs(f.values[m].real() - mean);
    osc /= static_cast<double>(members.size());
    worst = std::max(worst, osc);
  }
  return worst;
}

double bmo_norm(const CallableField& f, const BallFamily& balls, int min_samples,
                std::uint64_t seed) {
  if (balls.balls.empty()) throw std::invalid_argument("bmo_norm: empty ball family");
  double worst = 0.0;
  std::vector<double> vals;
  std::size_t ball_index = 0;
  for (const auto& b : balls.balls) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (++ball_index));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = b.center.n();
    vals.clear();
    HeisenbergPoint w = HeisenbergPoint::identity(n);
    int attempts = 0;
    const int max_attempts = min_samples * 64;
    while (static_cast<int>(vals.size()) < min_samples && attempts < max_attempts) {
      ++attempts;
      for (int i = 0; i < n; ++i) w.x(i) = (2.0 * u01(rng) - 1.0) * b.radius;
      for (int i = 0; i < n; ++i) w.y(i) = (2.0 * u01(rng) - 1.0) * b.radius;
      w.t = (2.0 * u01(rng) - 1.0) * 0.25 * b.radius * b.radius;
      if (koranyi_norm(w) > b.radius) continue;
      vals.push_back(f.eval(group_mul(b.center, w)));
    }
    if (static_cast<int>(vals.size()) < min_samples) {
      throw std::runtime_error("bmo_norm: rejection sampling starved on a ball");
    }
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double osc = 0.0;
    for (double v : vals) osc += std::abs(v - mean);
    osc /= static_cast<double>(vals.size());
    worst = std::max(worst, osc);
  }
  return worst;
}

}  // namespace hfrac
