#pragma once
// Discrete covering construction on a one-dimensional space grid.
//
// Space is resolved by columns: a cylinder over B_r(y), r = rho dx with y a
// column center, owns the columns whose centers lie in B_r(y). Time is kept
// exact: E and E-hat are stored per column as unions of open intervals, and
// Gamma is a union of grid cells, so every measure below is exact arithmetic
// on interval lengths times closed-form column masses of mu.

#include <map>

#include "hlab/geometry.hpp"

namespace hlab {

/// Gamma as a set of grid cells [x0 + c dx, x0 + (c+1) dx) x [t0 + k dt, t0 + (k+1) dt).
struct DiscreteSet {
  double x0 = 0.0, dx = 1.0;
  int ncols = 0;
  double t0 = 0.0, dt = 1.0;
  int nrows = 0;
  std::vector<char> cells;  // column-major: cells[c * nrows + k]

  DiscreteSet() = default;
  DiscreteSet(double x0_, double dx_, int ncols_, double t0_, double dt_, int nrows_)
      : x0(x0_), dx(dx_), ncols(ncols_), t0(t0_), dt(dt_), nrows(nrows_),
        cells(static_cast<std::size_t>(ncols_) * nrows_, 0) {
    if (!(dx > 0 && dt > 0) || ncols <= 0 || nrows <= 0)
      throw NumericalError("discrete set needs a nonempty grid with positive cell sizes");
  }

  bool has(int c, long long k) const {
    if (c < 0 || c >= ncols || k < 0 || k >= nrows) return false;
    return cells[static_cast<std::size_t>(c) * nrows + k] != 0;
  }
  void set(int c, int k, bool v = true) {
    cells.at(static_cast<std::size_t>(c) * nrows + k) = v ? 1 : 0;
  }
  double col_center(int c) const { return x0 + (c + 0.5) * dx; }
  double row_time(long long k) const { return t0 + static_cast<double>(k) * dt; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), 1));
  }
};

/// Random blocks plus sprinkled single cells.
/// The default cell sizes are powers of two so that depths r^2 for omega = 1
/// land exactly on row boundaries.
inline DiscreteSet random_gamma(std::uint64_t seed, int ncols = 32, int nrows = 96,
                                double x0 = -1.0, double dx = 1.0 / 16, double t0 = 0.0,
                                double dt = 1.0 / 256) {
  DiscreteSet g(x0, dx, ncols, t0, dt, nrows);
  Rng rng(seed);
  const int blocks = static_cast<int>(rng.integer(3, 8));
  for (int b = 0; b < blocks; ++b) {
    const int w = static_cast<int>(rng.integer(1, std::max(1, ncols / 4)));
    const int h = static_cast<int>(rng.integer(1, std::max(1, nrows / 6)));
    const int c0 = static_cast<int>(rng.integer(0, ncols - w));
    const int k0 = static_cast<int>(rng.integer(0, nrows - h));
    for (int c = c0; c < c0 + w; ++c)
      for (int k = k0; k < k0 + h; ++k) g.set(c, k);
  }
  const int sprinkles = static_cast<int>(rng.integer(0, ncols * nrows / 20));
  for (int i = 0; i < sprinkles; ++i)
    g.set(static_cast<int>(rng.integer(0, ncols - 1)), static_cast<int>(rng.integer(0, nrows - 1)));
  return g;
}

/// A candidate cylinder over columns [col - rho + 1, col + rho - 1].
struct GridCylinder {
  int col = 0;
  int rho = 1;
  long long top_row = 0;
  WCylinder cyl;  // continuum description: y = column center, r = rho dx, s = top

  int first_col() const { return col - rho + 1; }
  int last_col() const { return col + rho - 1; }
  double s() const { return cyl.Y.t; }
  double depth() const { return cyl.depth; }
};

namespace detail {

using Interval = std::pair<double, double>;

inline std::vector<Interval> merge_intervals(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!(iv.second > iv.first)) continue;
    if (!out.empty() && iv.first <= out.back().second)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

inline double total_length(const std::vector<Interval>& merged) {
  double s = 0.0;
  for (const auto& iv : merged) s += iv.second - iv.first;
  return s;
}

}  // namespace detail

/// Exact per-column queries against Gamma and closed-form column masses.
class CoveringGrid {
 public:
  CoveringGrid(const DiscreteSet& g, const WeightSpec& w) : g_(g), w_(w) {
    if (w.dim() != 1) throw NumericalError("the covering construction is implemented for n = 1");
    prefix_.assign(g.ncols, {});
    for (int c = 0; c < g.ncols; ++c) {
      auto& p = prefix_[c];
      p.assign(g.nrows + 1, 0);
      for (int k = 0; k < g.nrows; ++k) p[k + 1] = p[k] + (g.has(c, k) ? 1 : 0);
    }
  }

  const DiscreteSet& gamma() const { return g_; }
  const WeightSpec& weight() const { return w_; }

  /// mu-mass of column c, integrated in closed form.
  double column_mass(int c) const {
    auto it = mass_.find(c);
    if (it != mass_.end()) return it->second;
    const double lo = g_.x0 + c * g_.dx;
    const Ball b{{lo + 0.5 * g_.dx}, 0.5 * g_.dx};
    const double m = weighted_measure(w_, Field::mu, b);
    mass_.emplace(c, m);
    return m;
  }

  /// |Gamma_c intersected with (-inf, t)|.
  double gamma_below(int c, double t) const {
    if (c < 0 || c >= g_.ncols) return 0.0;
    const double u = (t - g_.t0) / g_.dt;
    if (u <= 0) return 0.0;
    if (u >= g_.nrows) return prefix_[c][g_.nrows] * g_.dt;
    long long k = static_cast<long long>(std::floor(u));
    // Keep k consistent with row_time rounding.
    while (k > 0 && g_.row_time(k) > t) --k;
    while (k + 1 <= g_.nrows && g_.row_time(k + 1) <= t) ++k;
    double v = prefix_[c][k] * g_.dt;
    if (k < g_.nrows && g_.has(c, k)) v += t - g_.row_time(k);
    return v;
  }

  double gamma_in(int c, double lo, double hi) const {
    return hi > lo ? gamma_below(c, hi) - gamma_below(c, lo) : 0.0;
  }

  double gamma_column_length(int c) const {
    return (c >= 0 && c < g_.ncols) ? prefix_[c][g_.nrows] * g_.dt : 0.0;
  }

  double mu_gamma() const {
    double s = 0.0;
    for (int c = 0; c < g_.ncols; ++c) s += column_mass(c) * gamma_column_length(c);
    return s;
  }

  double mu_cylinder(const GridCylinder& q) const {
    double s = 0.0;
    for (int c = q.first_col(); c <= q.last_col(); ++c) s += column_mass(c);
    return s * q.depth();
  }

  double mu_cylinder_gamma(const GridCylinder& q) const {
    double s = 0.0;
    for (int c = q.first_col(); c <= q.last_col(); ++c)
      s += column_mass(c) * gamma_in(c, q.s() - q.depth(), q.s());
    return s;
  }

  GridCylinder make(int col, int rho, long long top_row) const {
    GridCylinder q;
    q.col = col;
    q.rho = rho;
    q.top_row = top_row;
    q.cyl = make_cylinder(w_, {{g_.col_center(col)}, g_.row_time(top_row)}, rho * g_.dx);
    return q;
  }

 private:
  DiscreteSet g_;
  WeightSpec w_;
  std::vector<std::vector<long long>> prefix_;
  mutable std::map<int, double> mass_;
};

/// All grid-aligned centers and the given dyadic radii whose cylinders touch Gamma's box.
inline std::vector<GridCylinder> enumerate_candidates(const CoveringGrid& grid,
                                                      const std::vector<int>& radii = {1, 2, 4, 8}) {
  const auto& g = grid.gamma();
  std::vector<GridCylinder> out;
  for (int rho : radii) {
    if (rho < 1) throw NumericalError("candidate radii must be positive column counts");
    for (int c = -rho + 1; c <= g.ncols + rho - 2; ++c) {
      const GridCylinder probe = grid.make(c, rho, 0);
      const long long extra = static_cast<long long>(std::ceil(probe.depth() / g.dt));
      for (long long K = 1; K <= g.nrows + extra; ++K) out.push_back(grid.make(c, rho, K));
    }
  }
  return out;
}

/// Candidates with mu(C cap Gamma) >= (1 - delta0) mu(C).
inline std::vector<GridCylinder> admissible_family(const CoveringGrid& grid, double delta0,
                                                   const std::vector<GridCylinder>& candidates,
                                                   int threads = 1) {
  if (!(delta0 > 0 && delta0 < 1)) throw NumericalError("delta0 must lie in (0, 1)");
  std::vector<char> keep(candidates.size(), 0);
  // Column masses are cached lazily; fill the cache before going parallel.
  for (const auto& q : candidates)
    for (int c = q.first_col(); c <= q.last_col(); ++c) grid.column_mass(c);
  parallel_for(candidates.size(), threads, [&](std::size_t i) {
    const auto& q = candidates[i];
    keep[i] = grid.mu_cylinder_gamma(q) >= (1.0 - delta0) * grid.mu_cylinder(q);
  });
  std::vector<GridCylinder> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) out.push_back(candidates[i]);
  if (out.empty()) throw EmptyFamily("no candidate cylinder meets the density threshold");
  return out;
}

/// Disjointness of the open continuum cylinders; balls are compared in
/// integer column units, |y_a - y_b| >= r_a + r_b.
inline bool disjoint(const GridCylinder& a, const GridCylinder& b) {
  const bool space = std::abs(a.col - b.col) >= a.rho + b.rho;
  const bool time = a.s() <= b.s() - b.depth() || b.s() <= a.s() - a.depth();
  return space || time;
}

/// Greedy Vitali selection: decreasing radius, ties by lexicographic center (y, s).
inline std::vector<GridCylinder> vitali_select(std::vector<GridCylinder> family) {
  std::stable_sort(family.begin(), family.end(), [](const GridCylinder& a, const GridCylinder& b) {
    if (a.cyl.r != b.cyl.r) return a.cyl.r > b.cyl.r;
    if (a.cyl.Y.x != b.cyl.Y.x) return a.cyl.Y.x < b.cyl.Y.x;
    return a.cyl.Y.t < b.cyl.Y.t;
  });
  std::vector<GridCylinder> chosen;
  for (const auto& q : family) {
    bool ok = true;
    for (const auto& c : chosen)
      if (!disjoint(q, c)) {
        ok = false;
        break;
      }
    if (ok) chosen.push_back(q);
  }
  return chosen;
}

inline double q0(int n, double K0, double delta0) {
  return 1.0 + std::pow(3.0, -(n + 1) * (n + 1) - 1) * std::pow(K0, -n - 1) * delta0;
}

inline double q1(double K1) { return (K1 - 1.0) / (K1 + 1.0); }

/// Per-column time sets of E and E-hat.
struct ColumnSets {
  std::map<int, std::vector<detail::Interval>> E, hatE;
};

inline ColumnSets column_sets(const std::vector<GridCylinder>& family, double K1) {
  ColumnSets cs;
  std::map<int, std::vector<detail::Interval>> e, h;
  for (const auto& q : family) {
    const double s = q.s(), d = q.cyl.full_depth();
    for (int c = q.first_col(); c <= q.last_col(); ++c) {
      e[c].push_back({s - q.depth(), s});
      h[c].push_back({s + d, s + K1 * d});
    }
  }
  for (auto& [c, v] : e) cs.E[c] = detail::merge_intervals(v);
  for (auto& [c, v] : h) cs.hatE[c] = detail::merge_intervals(v);
  return cs;
}

struct CoveringReport {
  int n = 1;
  double delta0 = 0.5, K0 = 1.0, K1 = 3.0;
  double mu_gamma = 0, mu_E = 0, mu_hatE = 0, mu_gamma_minus_E = 0;
  double q0_required = 1, q1_required = 0;
  bool q0_pass = false, q1_pass = false, column_pass = false;
  double worst_column_ratio = kInf;  // min over columns of |E-hat_c| / |E_c|
  std::size_t candidates = 0, admitted = 0;
  std::vector<std::pair<SpacetimePoint, double>> selected;  // (Y, r)

  bool pass() const { return q0_pass && q1_pass && column_pass; }
};

inline CoveringReport build_E_and_hatE(const CoveringGrid& grid, double delta0, double K0,
                                       double K1, const std::vector<GridCylinder>& candidates,
                                       int threads = 1) {
  if (!(K0 >= 1)) throw NumericalError("K0 must be at least 1");
  if (!(K1 > 1)) throw NumericalError("K1 must exceed 1");
  CoveringReport rep;
  rep.n = 1;
  rep.delta0 = delta0;
  rep.K0 = K0;
  rep.K1 = K1;
  rep.q0_required = q0(1, K0, delta0);
  rep.q1_required = q1(K1);
  rep.candidates = candidates.size();
  const auto family = admissible_family(grid, delta0, candidates, threads);
  rep.admitted = family.size();
  for (const auto& q : vitali_select(family)) rep.selected.push_back({q.cyl.Y, q.cyl.r});

  const ColumnSets cs = column_sets(family, K1);
  rep.mu_gamma = grid.mu_gamma();
  bool column_ok = true;
  for (const auto& [c, ivs] : cs.E) {
    const double m = grid.column_mass(c);
    const double len = detail::total_length(ivs);
    rep.mu_E += m * len;
    double covered = 0.0;
    for (const auto& iv : ivs) covered += grid.gamma_in(c, iv.first, iv.second);
    rep.mu_gamma_minus_E += m * std::max(0.0, grid.gamma_column_length(c) - covered);
    const auto it = cs.hatE.find(c);
    const double hat = it == cs.hatE.end() ? 0.0 : detail::total_length(it->second);
    if (len > 0) {
      rep.worst_column_ratio = std::min(rep.worst_column_ratio, hat / len);
      if (hat < rep.q1_required * len * (1 - 1e-12)) column_ok = false;
    }
  }
  for (int c = 0; c < grid.gamma().ncols; ++c)
    if (!cs.E.count(c)) rep.mu_gamma_minus_E += grid.column_mass(c) * grid.gamma_column_length(c);
  for (const auto& [c, ivs] : cs.hatE) rep.mu_hatE += grid.column_mass(c) * detail::total_length(ivs);
  rep.q0_pass = rep.mu_E >= rep.q0_required * rep.mu_gamma;
  rep.q1_pass = rep.mu_hatE >= rep.q1_required * rep.mu_E;
  rep.column_pass = column_ok;
  return rep;
}

inline std::string covering_csv_header() {
  return "seed,n,delta0,K0,K1,mu_gamma,mu_E,mu_hatE,mu_gamma_minus_E,q0_required,q1_required,"
         "E_over_gamma,hatE_over_E,worst_column_ratio,candidates,admitted,selected,q0_pass,"
         "q1_pass,column_pass";
}

inline std::string covering_csv_row(std::uint64_t seed, const CoveringReport& r) {
  std::string s = std::to_string(seed) + "," + std::to_string(r.n);
  for (double v : {r.delta0, r.K0, r.K1, r.mu_gamma, r.mu_E, r.mu_hatE, r.mu_gamma_minus_E,
                   r.q0_required, r.q1_required, r.mu_E / r.mu_gamma, r.mu_hatE / r.mu_E,
                   r.worst_column_ratio})
    s += "," + fmt17(v);
  s += "," + std::to_string(r.candidates) + "," + std::to_string(r.admitted) + "," +
       std::to_string(r.selected.size());
  s += std::string(",") + (r.q0_pass ? "1" : "0") + "," + (r.q1_pass ? "1" : "0") + "," +
       (r.column_pass ? "1" : "0");
  return s;
}

}  // namespace hlab
