#pragma once
// Seeded property sweeps over the weighted geometry. Each returns the worst
// case observed together with per-sample rows for CSV output.

#include "hlab/geometry.hpp"

namespace hlab {

inline constexpr double kRoundingSlack = 1e-12;

struct QuasiRow {
  SpacetimePoint X, Y, Z;
  double rho_xy = 0, rho_yz = 0, rho_xz = 0, theta_xy = 0;
  double factor = 0;     // rho(X,Z) / (rho(X,Y) + rho(Y,Z))
  double sandwich = 1;   // rho(X,Y) / Theta(X,Y)
};

struct QuasiReport {
  std::vector<QuasiRow> rows;
  double max_factor = 0, min_sandwich = kInf, max_sandwich = 0;
  bool pass() const {
    return max_factor <= 2 * (1 + kRoundingSlack) && min_sandwich >= 1 &&
           max_sandwich <= std::sqrt(2.0) * (1 + kRoundingSlack);
  }
};

/// Uniform points in box^n x [-box, box]; every sample is a triple, so the
/// pair checks run on (X, Y) and the triangle check on (X, Y, Z).
inline QuasiReport quasi_metric_sweep(const WeightSpec& w, std::uint64_t seed, int count,
                                      double box = 2.0, bool keep_rows = false) {
  QuasiReport rep;
  Rng rng(seed);
  const int n = w.dim();
  auto pt = [&] {
    SpacetimePoint p{Point(n), 0.0};
    for (auto& v : p.x) v = rng.uniform(-box, box);
    p.t = rng.uniform(-box, box);
    return p;
  };
  for (int i = 0; i < count; ++i) {
    QuasiRow r;
    r.X = pt();
    r.Y = pt();
    r.Z = pt();
    r.rho_xy = quasi_distance(r.X, r.Y, w);
    r.rho_yz = quasi_distance(r.Y, r.Z, w);
    r.rho_xz = quasi_distance(r.X, r.Z, w);
    const auto& lo = r.X.t <= r.Y.t ? r.X : r.Y;
    const auto& hi = r.X.t <= r.Y.t ? r.Y : r.X;
    r.theta_xy = theta(lo, hi, w);
    const double sum = r.rho_xy + r.rho_yz;
    r.factor = sum > 0 ? r.rho_xz / sum : 0.0;
    r.sandwich = r.theta_xy > 0 ? r.rho_xy / r.theta_xy : 1.0;
    rep.max_factor = std::max(rep.max_factor, r.factor);
    rep.min_sandwich = std::min(rep.min_sandwich, r.sandwich);
    rep.max_sandwich = std::max(rep.max_sandwich, r.sandwich);
    if (keep_rows) rep.rows.push_back(r);
  }
  return rep;
}

struct MeasureRow {
  SpacetimePoint Y;
  double r = 0, depth = 0, formula = 0, direct = 0, rel_err = 0;
};

struct MeasureReport {
  std::vector<MeasureRow> rows;
  double max_rel_err = 0;
  double tolerance = 1e-5;
  bool pass() const { return max_rel_err <= tolerance; }
};

/// Closed-form mu(C) against direct space-time quadrature on random cylinders.
inline MeasureReport cylinder_measure_sweep(const WeightSpec& w, std::uint64_t seed, int count,
                                            double tolerance = 1e-5) {
  MeasureReport rep;
  rep.tolerance = tolerance;
  Rng rng(seed);
  const int n = w.dim();
  for (int i = 0; i < count; ++i) {
    MeasureRow row;
    row.Y = SpacetimePoint{Point(n), rng.uniform(-1, 1)};
    for (auto& v : row.Y.x) v = rng.uniform(-1, 1);
    row.r = rng.log_uniform(0.05, 2.0);
    const auto c = make_cylinder(w, row.Y, row.r);
    row.depth = c.depth;
    row.formula = cylinder_mu_measure(c);
    row.direct = cylinder_mu_measure_direct(c);
    row.rel_err = std::fabs(row.direct - row.formula) / row.formula;
    rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
    rep.rows.push_back(row);
  }
  return rep;
}

struct InclusionReport {
  int checked = 0, failed = 0;
  bool pass() const { return failed == 0; }
};

/// X0 drawn inside C_{(1-theta) r}(Y); C_{theta r}(X0) must lie in C_r(Y).
inline InclusionReport inclusion_sweep(const WeightSpec& w, std::uint64_t seed, int count) {
  InclusionReport rep;
  Rng rng(seed);
  const int n = w.dim();
  for (int i = 0; i < count; ++i) {
    const double th = rng.uniform(0.01, 0.99);
    SpacetimePoint Y{Point(n), rng.uniform(-1, 1)};
    for (auto& v : Y.x) v = rng.uniform(-1, 1);
    const double r = rng.log_uniform(0.1, 3);
    const auto inner = make_cylinder(w, Y, (1 - th) * r);
    SpacetimePoint X0{Y.x, Y.t - inner.depth * rng.uniform(1e-9, 1 - 1e-9)};
    // Uniform direction, radius strictly inside the inner ball.
    Point dir(n);
    double len = 0;
    do {
      for (auto& v : dir) v = rng.uniform(-1, 1);
      len = norm(dir);
    } while (len > 1 || len == 0);
    const double rad = (1 - th) * r * rng.uniform(0, 1) * 0.999999;
    for (int a = 0; a < n; ++a) X0.x[a] += rad * dir[a] / len;
    if (!inner.contains(X0)) continue;
    ++rep.checked;
    if (!inclusion_check(w, Y, r, th, X0)) ++rep.failed;
  }
  return rep;
}

}  // namespace hlab
