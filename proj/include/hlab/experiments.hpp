#pragma once
// Ensemble experiments on weighted cylinders. Every member is solved in
// normalized coordinates: a cylinder C_{R,mu}(Y) maps to the unit ball times
// tau in [-1, 0] through
//   x = y + R xi,  t = s + D tau,  D = R^2 (mu)_{B_R(y)}^{1/n},
// under which the equation becomes u_tau = w~(xi) a D_xi^2 u with
// w~(xi) = omega(y + R xi) / omega_ref and omega_ref = (mu)_{B_R(y)}^{-1/n}.
// Coefficient fields are specified directly in (xi, tau).
//
// Discrete node sets: space conditions are strict (|xi - c| < radius) and time
// windows are half-open (lo, hi], so the top layer of a backward window
// belongs to it.

#include <map>

#include "hlab/solver.hpp"

namespace hlab {

// ---------------------------------------------------------------------------
// Normalization.
// ---------------------------------------------------------------------------

namespace detail {

inline WeightSpec scale_weight(const WeightSpec& w, const Point& y, double R) {
  const auto& k = w.kind();
  const int n = w.dim();
  if (auto* p = std::get_if<ConstantWeight>(&k)) return WeightSpec::constant(p->c, n);
  if (auto* p = std::get_if<PowerWeight>(&k)) {
    Point c(n);
    for (int i = 0; i < n; ++i) c[i] = (p->center[i] - y[i]) / R;
    return WeightSpec::product(
        {WeightSpec::constant(std::pow(R, p->beta), n), WeightSpec::power(p->beta, c, n)});
  }
  if (auto* p = std::get_if<TabulatedWeight>(&k)) {
    std::vector<double> xs(p->x.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = (p->x[i] - y[0]) / R;
    return WeightSpec::tabulated(xs, p->w, w.singular_floor());
  }
  const auto& pr = std::get<ProductWeight>(k);
  std::vector<WeightSpec> fs;
  for (const auto& f : pr.factors) fs.push_back(scale_weight(f, y, R));
  return WeightSpec::product(std::move(fs));
}

}  // namespace detail

struct Normalization {
  WeightSpec weight = WeightSpec::constant(1.0, 1);  // physical omega
  WeightSpec scaled = WeightSpec::constant(1.0, 1);  // w~ on the unit ball
  SpacetimePoint Y;
  double R = 1.0;
  double omega_ref = 1.0;  // (mu)_{B_R(y)}^{-1/n}
  double D = 1.0;          // depth of C_{R,mu}(Y)

  int dim() const { return weight.dim(); }
  Point to_x(const Point& xi) const {
    Point x(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) x[i] = Y.x[i] + R * xi[i];
    return x;
  }
  double to_t(double tau) const { return Y.t + D * tau; }
  /// Physical radius and depth in normalized units.
  double radius(double rho) const { return rho / R; }
  double depth(double d) const { return d / D; }
};

/// For constant weights omega_ref is omega itself, so w~ = 1 exactly.
inline Normalization normalize(const WeightSpec& w, const SpacetimePoint& Y, double R) {
  Normalization z;
  z.weight = w;
  z.Y = Y;
  z.R = R;
  const int n = w.dim();
  if (w.is_constant()) {
    z.omega_ref = w.omega(Y.x);
    z.scaled = WeightSpec::constant(1.0, n);
  } else {
    z.omega_ref = std::pow(ball_mean(w, Field::mu, Ball{Y.x, R}), -1.0 / n);
    z.scaled = WeightSpec::product(
        {WeightSpec::constant(1.0 / z.omega_ref, n), detail::scale_weight(w, Y.x, R)});
  }
  z.D = R * R / z.omega_ref;
  return z;
}

// ---------------------------------------------------------------------------
// Ensemble description.
// ---------------------------------------------------------------------------

/// Coefficient field recipe in normalized coordinates; checkerboards are
/// reseeded per member.
struct CoeffSpec {
  std::string kind = "identity";  // identity | constant | checkerboard | rotating
  double nu = 0.5;
  Sym2 a;
  double cell_x = 0.25, cell_t = 0.25;
  bool time_dependent = true;
  double theta0 = 0.0, kx = 1.0, kt = 0.0;

  CoefficientField make(int n, std::uint64_t seed) const {
    if (kind == "identity") return CoefficientField::identity(n, nu);
    if (kind == "constant") return CoefficientField::constant(a, n, nu);
    if (kind == "checkerboard")
      return CoefficientField::checkerboard(n, nu, seed, cell_x, cell_t, Point(n, -1.0), -1.0,
                                            time_dependent);
    if (kind == "rotating") return CoefficientField::rotating(n, nu, theta0, kx, kt);
    throw ParseError("unknown coefficient kind '" + kind + "'");
  }
};

/// Random initial data on the unit ball: a trigonometric polynomial of degree
/// <= `degree` clipped at 0, plus Gaussian bumps, plus `floor`.
struct DataSpec {
  int degree = 8;
  int terms = 4;
  int bumps = 2;
  double floor = 1e-6;
  bool trig = true;
};

struct EnsembleSpec {
  WeightSpec weight = WeightSpec::constant(1.0, 1);
  CoeffSpec coeff;
  DataSpec data;
  int count = 64;
  std::uint64_t seed = 1;
  std::vector<double> scales{1.0};
  SpacetimePoint Y{{0.0}, 0.0};
  int cells = 32;  // cells per unit normalized length
  Scheme scheme = Scheme::explicit_euler;
  double stretch = 1.0;  // implicit steps = explicit CFL steps / stretch
  int threads = 1;

  int dim() const { return weight.dim(); }
  std::uint64_t member_seed(int m) const { return mix_seed(seed, static_cast<std::uint64_t>(m)); }
};

struct RandomData {
  double c0 = 0.0;
  std::vector<std::vector<int>> k;
  std::vector<double> amp, phase;
  std::vector<Point> centers;
  std::vector<double> widths, heights;
  double floor = 0.0;
  bool trig = true;

  double operator()(const Point& xi) const {
    double T = 0.0;
    if (trig) {
      T = c0;
      for (std::size_t j = 0; j < amp.size(); ++j) {
        double arg = phase[j];
        for (std::size_t i = 0; i < xi.size(); ++i) arg += std::numbers::pi * k[j][i] * xi[i];
        T += amp[j] * std::cos(arg);
      }
      T = std::max(T, 0.0);
    }
    for (std::size_t b = 0; b < centers.size(); ++b)
      T += heights[b] * std::exp(-dist2(xi, centers[b]) / (2 * widths[b] * widths[b]));
    return T + floor;
  }
};

inline RandomData draw_data(int n, std::uint64_t seed, const DataSpec& spec) {
  Rng rng(mix_seed(seed, 0xD16));
  RandomData d;
  d.floor = spec.floor;
  d.trig = spec.trig;
  d.c0 = rng.uniform(0.0, 1.0);
  for (int j = 0; spec.trig && j < spec.terms; ++j) {
    std::vector<int> k(n);
    int mag = 0;
    while (mag == 0) {
      mag = 0;
      for (auto& v : k) {
        v = static_cast<int>(rng.integer(-spec.degree, spec.degree));
        mag = std::max(mag, std::abs(v));
      }
    }
    d.k.push_back(k);
    d.amp.push_back(rng.uniform(-1.0, 1.0) / (1.0 + mag));
    d.phase.push_back(rng.uniform(0.0, 2 * std::numbers::pi));
  }
  for (int b = 0; b < spec.bumps; ++b) {
    Point c(n);
    do {
      for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    } while (norm(c) >= 1.0);
    d.centers.push_back(c);
    d.widths.push_back(rng.uniform(0.05, 0.3));
    d.heights.push_back(rng.uniform(0.2, 2.0));
  }
  return d;
}

// ---------------------------------------------------------------------------
// One normalized solve.
// ---------------------------------------------------------------------------

struct NormalizedRun {
  Normalization z;
  Problem problem;
  GridSpec grid;
  std::vector<Point> xi;  // node coordinates

  /// Nodes with |xi - c| < radius.
  std::vector<std::size_t> ball_nodes(const Point& c, double radius) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < xi.size(); ++i)
      if (dist(xi[i], c) < radius) out.push_back(i);
    return out;
  }
  /// Layers with lo < tau_k <= hi.
  std::pair<int, int> layers(double lo, double hi) const {
    int a = grid.steps + 1, b = -1;
    for (int k = 0; k <= grid.steps; ++k) {
      const double t = grid.time(k);
      if (t > lo && t <= hi) {
        a = std::min(a, k);
        b = std::max(b, k);
      }
    }
    return {a, b};
  }
};

/// Grid on [-1, 1]^n x [tau0, 0] with active nodes |xi| < 1. With data given
/// in normalized coordinates.
inline NormalizedRun normalized_run(const WeightSpec& w, const SpacetimePoint& Y, double R,
                                    const CoefficientField& a, SpaceFn initial,
                                    SpaceTimeFn boundary, int cells, Scheme scheme,
                                    double stretch, double tau0 = -1.0) {
  NormalizedRun run;
  run.z = normalize(w, Y, R);
  const int n = w.dim();
  run.problem.w = run.z.scaled;
  run.problem.a = a;
  run.problem.initial = std::move(initial);
  run.problem.boundary = std::move(boundary);
  run.problem.active = [](const Point& x) { return norm(x) < 1.0; };
  run.grid = box_grid(run.problem, Point(n, -1.0), Point(n, 1.0), std::vector<int>(n, 2 * cells + 1),
                      tau0, 0.0, scheme, stretch);
  run.xi.resize(run.grid.node_count());
  for (std::size_t i = 0; i < run.xi.size(); ++i) run.xi[i] = run.grid.node(i);
  return run;
}

/// Physical data mapped into normalized coordinates.
inline NormalizedRun normalized_run_physical(const WeightSpec& w, const SpacetimePoint& Y, double R,
                                             const CoefficientField& a, const SpaceFn& initial,
                                             const SpaceTimeFn& boundary, int cells,
                                             Scheme scheme, double stretch) {
  const Normalization z = normalize(w, Y, R);
  return normalized_run(
      w, Y, R, a, [z, initial](const Point& xi) { return initial(z.to_x(xi)); },
      [z, boundary](const Point& xi, double tau) { return boundary(z.to_x(xi), z.to_t(tau)); },
      cells, scheme, stretch);
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Below this an infimum counts as underflowed.
inline constexpr double kUnderflowFloor = 1e-300;

// ---------------------------------------------------------------------------
// Harnack.
// ---------------------------------------------------------------------------

struct HarnackMember {
  double scale = 1.0;
  int member = 0;
  std::uint64_t seed = 0;
  double sup_u1 = 0.0, inf_u2 = 0.0, ratio = 0.0;
  bool finite = false;
  bool comparison_ok = false;  // min data <= u <= max data at every node
};

struct HarnackScale {
  double r = 1.0;
  double max_ratio = 0.0, min_ratio = 0.0, median_ratio = 0.0;
  int members = 0, finite_members = 0;
  // Echo of the geometry in physical time.
  double u1_lo = 0, u1_hi = 0, u2_lo = 0, u2_hi = 0;
  std::size_t u1_nodes = 0, u2_nodes = 0;  // space-time node counts
  double wbmo = 0.0;                       // [[omega]] on B_{4r}(y)
  int steps = 0, nodes = 0;
};

struct HarnackReport {
  std::vector<HarnackMember> members;
  std::vector<HarnackScale> scales;
  int u2_inset_cells = 1;
  double spread() const {
    double hi = 0.0, lo = kInf;
    for (const auto& s : scales) {
      hi = std::max(hi, s.max_ratio);
      lo = std::min(lo, s.max_ratio);
    }
    return scales.empty() ? 1.0 : hi / lo;
  }
  bool all_finite() const {
    for (const auto& m : members)
      if (!m.finite) return false;
    return true;
  }
};

/// Node sets of the Harnack windows in a normalized C_{2r} run:
/// U1 = {|xi| < 1/2} x (-3/4, -1/2], U2 = {|xi| < 1/2 - inset dxi} x (-1/4, 0].
struct HarnackWindows {
  std::vector<std::size_t> u1_space, u2_space;
  std::pair<int, int> u1_layers, u2_layers;
};

inline HarnackWindows harnack_windows(const NormalizedRun& run, int inset_cells) {
  HarnackWindows w;
  const Point o(run.z.dim(), 0.0);
  w.u1_space = run.ball_nodes(o, 0.5);
  w.u2_space = run.ball_nodes(o, 0.5 - inset_cells * run.grid.dx(0));
  w.u1_layers = run.layers(-0.75, -0.5);
  w.u2_layers = run.layers(-0.25, 0.0);
  return w;
}

/// sup over U1 and inf over U2 of one normalized run, plus the comparison
/// check against the data range.
inline HarnackMember harnack_member(const NormalizedRun& run, int inset_cells) {
  const auto win = harnack_windows(run, inset_cells);
  if (win.u1_space.empty() || win.u2_space.empty() || win.u1_layers.second < 0 ||
      win.u2_layers.second < 0)
    throw ResolutionTooCoarse("Harnack windows contain no grid nodes");
  HarnackMember m;
  double sup1 = -kInf, inf2 = kInf, lo = kInf, hi = -kInf, dlo = kInf, dhi = -kInf;
  bool ok = true;
  march(run.problem, run.grid, [&](int k, double t, std::span<const double> u) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      lo = std::min(lo, u[i]);
      hi = std::max(hi, u[i]);
    }
    // Data: initial layer and every boundary node.
    if (k == 0) {
      for (double v : u) {
        dlo = std::min(dlo, v);
        dhi = std::max(dhi, v);
      }
    } else {
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (run.problem.active(run.xi[i]) && run.grid.interior_index(i)) continue;
        dlo = std::min(dlo, u[i]);
        dhi = std::max(dhi, u[i]);
      }
    }
    (void)t;
    if (k >= win.u1_layers.first && k <= win.u1_layers.second)
      for (auto i : win.u1_space) sup1 = std::max(sup1, u[i]);
    if (k >= win.u2_layers.first && k <= win.u2_layers.second)
      for (auto i : win.u2_space) inf2 = std::min(inf2, u[i]);
  });
  ok = lo >= dlo && hi <= dhi;
  m.sup_u1 = sup1;
  m.inf_u2 = inf2;
  m.comparison_ok = ok;
  if (inf2 > kUnderflowFloor) {
    m.ratio = sup1 / inf2;
    m.finite = std::isfinite(m.ratio);
  } else {
    m.ratio = kInf;
    m.finite = false;
  }
  return m;
}

inline HarnackReport harnack_experiment(const EnsembleSpec& spec, int inset_cells = 1) {
  HarnackReport rep;
  rep.u2_inset_cells = inset_cells;
  const int n = spec.dim();
  const std::size_t S = spec.scales.size(), M = spec.count;
  rep.members.resize(S * M);
  rep.scales.resize(S);
  for (std::size_t j = 0; j < S; ++j) {
    const double r = spec.scales[j];
    auto& sc = rep.scales[j];
    sc.r = r;
    const double d2 = r * r * std::pow(ball_mean(spec.weight, Field::mu, Ball{spec.Y.x, 2 * r}),
                                       1.0 / n);
    sc.u1_lo = spec.Y.t - 3 * d2;
    sc.u1_hi = spec.Y.t - 2 * d2;
    sc.u2_lo = spec.Y.t - d2;
    sc.u2_hi = spec.Y.t;
    sc.wbmo = wbmo_ball(spec.weight, Ball{spec.Y.x, 4 * r});
  }
  parallel_for(S * M, spec.threads, [&](std::size_t q) {
    const std::size_t j = q / M;
    const int m = static_cast<int>(q % M);
    const std::uint64_t seed = spec.member_seed(m);
    const RandomData data = draw_data(n, seed, spec.data);
    const auto run = normalized_run(
        spec.weight, spec.Y, 2 * spec.scales[j], spec.coeff.make(n, mix_seed(seed, 0xC0EF)),
        [data](const Point& xi) { return data(xi); },
        [data](const Point& xi, double) { return data(xi); }, spec.cells, spec.scheme,
        spec.stretch);
    HarnackMember hm = harnack_member(run, inset_cells);
    hm.scale = spec.scales[j];
    hm.member = m;
    hm.seed = seed;
    rep.members[q] = hm;
    if (m == 0) {
      const auto win = harnack_windows(run, inset_cells);
      auto& sc = rep.scales[j];
      sc.u1_nodes = win.u1_space.size() * (win.u1_layers.second - win.u1_layers.first + 1);
      sc.u2_nodes = win.u2_space.size() * (win.u2_layers.second - win.u2_layers.first + 1);
      sc.steps = run.grid.steps;
      sc.nodes = static_cast<int>(run.grid.node_count());
    }
  });
  for (std::size_t j = 0; j < S; ++j) {
    auto& sc = rep.scales[j];
    std::vector<double> ratios;
    sc.max_ratio = 0.0;
    sc.min_ratio = kInf;
    for (std::size_t m = 0; m < M; ++m) {
      const auto& hm = rep.members[j * M + m];
      ++sc.members;
      if (hm.finite) ++sc.finite_members;
      ratios.push_back(hm.ratio);
      sc.max_ratio = std::max(sc.max_ratio, hm.ratio);
      sc.min_ratio = std::min(sc.min_ratio, hm.ratio);
    }
    sc.median_ratio = median(ratios);
  }
  return rep;
}

/// Max ratio for each beta of a centred power weight, everything else fixed.
/// Reported only; no pass/fail attaches to it.
struct BetaSweepRow {
  double beta = 0.0, wbmo = 0.0, max_ratio = 0.0, median_ratio = 0.0;
};

inline std::vector<BetaSweepRow> harnack_beta_sweep(EnsembleSpec spec,
                                                    const std::vector<double>& betas) {
  std::vector<BetaSweepRow> rows;
  const int n = spec.dim();
  for (double b : betas) {
    spec.weight = WeightSpec::power(b, Point(n, 0.0), n);
    const auto rep = harnack_experiment(spec);
    BetaSweepRow row;
    row.beta = b;
    row.wbmo = rep.scales.front().wbmo;
    for (const auto& s : rep.scales) {
      row.max_ratio = std::max(row.max_ratio, s.max_ratio);
      row.median_ratio = std::max(row.median_ratio, s.median_ratio);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Hoelder oscillation decay.
// ---------------------------------------------------------------------------

struct HoelderMember {
  int member = 0;
  std::uint64_t seed = 0;
  std::vector<double> tau, phi;  // tau_k = 4^{-k} r0 and the oscillation on C_{tau_k}(X0)
  bool fitted = false;
  double alpha = 0.0;        // min(1, least-squares slope of log phi against log tau)
  double raw_slope = 0.0;
  double contraction = 0.0;  // max_k phi_k / phi_{k-1}
  double seminorm = 0.0;     // max |u(X) - u(X0)| / rho(X, X0)^alpha over samples
  bool nonincreasing = false;
  bool alpha_ok() const { return !fitted || (alpha > 0 && alpha <= 1); }
};

struct HoelderReport {
  std::vector<HoelderMember> members;
  double r0 = 0.0;
  int kmax = 2;
  int min_nodes = 0;  // nodes across the smallest ball
};

struct HoelderOptions {
  int kmax = 2;
  int min_nodes = 8;
  int seminorm_samples = 32;
};

inline HoelderReport hoelder_experiment(const EnsembleSpec& spec, double r,
                                        const HoelderOptions& opt = {}) {
  const int n = spec.dim();
  HoelderReport rep;
  rep.r0 = r;
  rep.kmax = opt.kmax;
  rep.members.resize(spec.count);
  // Resolution check on the member-independent grid.
  {
    const auto probe = normalized_run(spec.weight, spec.Y, 2 * r, spec.coeff.make(n, 1),
                                      [](const Point&) { return 0.0; }, {}, spec.cells,
                                      spec.scheme, spec.stretch);
    const double smallest = std::pow(4.0, -opt.kmax) * r;
    const auto nodes = probe.ball_nodes(Point(n, 0.0), probe.z.radius(smallest));
    std::size_t across = nodes.size();
    if (n == 2) across = static_cast<std::size_t>(std::sqrt(static_cast<double>(nodes.size())));
    rep.min_nodes = static_cast<int>(across);
    if (static_cast<int>(across) < opt.min_nodes)
      throw ResolutionTooCoarse("smallest oscillation scale has " + std::to_string(across) +
                                " nodes across, need " + std::to_string(opt.min_nodes));
  }
  parallel_for(spec.count, spec.threads, [&](std::size_t q) {
    const int m = static_cast<int>(q);
    const std::uint64_t seed = spec.member_seed(m);
    const RandomData data = draw_data(n, seed, spec.data);
    const auto run = normalized_run(
        spec.weight, spec.Y, 2 * r, spec.coeff.make(n, mix_seed(seed, 0xC0EF)),
        [data](const Point& xi) { return data(xi); },
        [data](const Point& xi, double) { return data(xi); }, spec.cells, spec.scheme,
        spec.stretch);
    const auto& z = run.z;
    // X0: the top-layer node nearest the axis.
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < run.xi.size(); ++i)
      if (norm(run.xi[i]) < norm(run.xi[i0])) i0 = i;
    const Point xi0 = run.xi[i0];
    const SpacetimePoint X0{z.to_x(xi0), z.to_t(0.0)};
    HoelderMember hm;
    hm.member = m;
    hm.seed = seed;
    struct Window {
      std::vector<std::size_t> nodes;
      int first_layer;
      double hi = -kInf, lo = kInf;
    };
    std::vector<Window> wins;
    for (int k = 0; k <= opt.kmax; ++k) {
      const double tau = std::pow(4.0, -k) * r;
      const auto c = make_cylinder(spec.weight, X0, tau);
      Window w;
      w.nodes = run.ball_nodes(xi0, z.radius(tau));
      w.first_layer = run.layers(-z.depth(c.depth), 0.0).first;
      wins.push_back(std::move(w));
      hm.tau.push_back(tau);
    }
    // Seminorm samples inside C_{r0}(X0).
    Rng rng(mix_seed(seed, 0x5E));
    std::vector<std::pair<int, std::size_t>> samples;
    for (int i = 0; i < opt.seminorm_samples && !wins[0].nodes.empty(); ++i) {
      const int k = static_cast<int>(rng.integer(wins[0].first_layer, run.grid.steps));
      const auto node = wins[0].nodes[rng.integer(0, wins[0].nodes.size() - 1)];
      samples.emplace_back(k, node);
    }
    std::sort(samples.begin(), samples.end());
    std::vector<double> sample_u(samples.size());
    double u0 = 0.0;
    std::size_t next = 0;
    march(run.problem, run.grid, [&](int k, double, std::span<const double> u) {
      for (auto& w : wins) {
        if (k < w.first_layer) continue;
        for (auto i : w.nodes) {
          w.hi = std::max(w.hi, u[i]);
          w.lo = std::min(w.lo, u[i]);
        }
      }
      while (next < samples.size() && samples[next].first == k) {
        sample_u[next] = u[samples[next].second];
        ++next;
      }
      if (k == run.grid.steps) u0 = u[i0];
    });
    for (const auto& w : wins) hm.phi.push_back(w.hi - w.lo);
    hm.nonincreasing = true;
    for (std::size_t k = 1; k < hm.phi.size(); ++k) {
      if (hm.phi[k] > hm.phi[k - 1]) hm.nonincreasing = false;
      if (hm.phi[k - 1] > 0) hm.contraction = std::max(hm.contraction, hm.phi[k] / hm.phi[k - 1]);
    }
    if (hm.phi.back() > 0) {
      std::vector<double> lt, lp;
      for (std::size_t k = 0; k < hm.phi.size(); ++k) {
        lt.push_back(std::log(hm.tau[k]));
        lp.push_back(std::log(hm.phi[k]));
      }
      hm.fitted = true;
      hm.raw_slope = ls_slope(lt, lp);
      hm.alpha = std::min(1.0, hm.raw_slope);
      if (hm.alpha > 0) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
          const auto [k, node] = samples[i];
          const SpacetimePoint X{z.to_x(run.xi[node]), z.to_t(run.grid.time(k))};
          const double rho = quasi_distance(X, X0, spec.weight);
          if (rho > 0)
            hm.seminorm = std::max(hm.seminorm, std::fabs(sample_u[i] - u0) / std::pow(rho, hm.alpha));
        }
      }
    }
    rep.members[q] = std::move(hm);
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Liouville: oscillation on expanding cylinders C_{4^k r}(Y), k = 0..K.
// ---------------------------------------------------------------------------

struct LiouvilleMember {
  int member = 0;
  std::uint64_t seed = 0;
  std::vector<double> radius, phi;
  double c = 0.0;  // max_k (phi_0 / phi_k)^{1/k}
  bool pass() const { return c < 1.0; }
};

struct LiouvilleReport {
  std::vector<LiouvilleMember> members;
  int K = 3;
  double domain_radius = 0.0, horizon = 0.0;
  int nodes_across_r = 0;
  double max_c() const {
    double c = 0.0;
    for (const auto& m : members) c = std::max(c, m.c);
    return c;
  }
};

struct LiouvilleOptions {
  int K = 3;
  double margin = 1.25;  // domain radius = margin 4^K r
  double horizon = 2.0;  // solve over tau in [-horizon, 0]
  int min_nodes = 8;
};

inline LiouvilleReport liouville_experiment(const EnsembleSpec& spec, double r,
                                            const LiouvilleOptions& opt = {}) {
  const int n = spec.dim();
  LiouvilleReport rep;
  rep.K = opt.K;
  rep.horizon = opt.horizon;
  const double R = opt.margin * std::pow(4.0, opt.K) * r;
  rep.domain_radius = R;
  rep.members.resize(spec.count);
  parallel_for(spec.count, spec.threads, [&](std::size_t q) {
    const int m = static_cast<int>(q);
    const std::uint64_t seed = spec.member_seed(m);
    const RandomData data = draw_data(n, seed, spec.data);
    const auto run = normalized_run(
        spec.weight, spec.Y, R, spec.coeff.make(n, mix_seed(seed, 0xC0EF)),
        [data](const Point& xi) { return data(xi); },
        [data](const Point& xi, double) { return data(xi); }, spec.cells, spec.scheme,
        spec.stretch, -opt.horizon);
    const auto& z = run.z;
    const Point o(n, 0.0);
    struct Window {
      std::vector<std::size_t> nodes;
      int first_layer;
      double hi = -kInf, lo = kInf;
    };
    std::vector<Window> wins;
    LiouvilleMember lm;
    lm.member = m;
    lm.seed = seed;
    for (int k = 0; k <= opt.K; ++k) {
      const double rk = std::pow(4.0, k) * r;
      const auto c = make_cylinder(spec.weight, spec.Y, rk);
      Window w;
      w.nodes = run.ball_nodes(o, z.radius(rk));
      w.first_layer = run.layers(-z.depth(c.depth), 0.0).first;
      if (k == 0) {
        std::size_t across = w.nodes.size();
        if (n == 2) across = static_cast<std::size_t>(std::sqrt(static_cast<double>(across)));
        if (m == 0) rep.nodes_across_r = static_cast<int>(across);
        if (static_cast<int>(across) < opt.min_nodes)
          throw ResolutionTooCoarse("C_r has " + std::to_string(across) +
                                    " nodes across, need " + std::to_string(opt.min_nodes));
      }
      wins.push_back(std::move(w));
      lm.radius.push_back(rk);
    }
    march(run.problem, run.grid, [&](int k, double, std::span<const double> u) {
      for (auto& w : wins) {
        if (k < w.first_layer) continue;
        for (auto i : w.nodes) {
          w.hi = std::max(w.hi, u[i]);
          w.lo = std::min(w.lo, u[i]);
        }
      }
    });
    for (const auto& w : wins) lm.phi.push_back(w.hi - w.lo);
    for (int k = 1; k <= opt.K; ++k) {
      const double ratio = lm.phi[k] > 0 ? lm.phi[0] / lm.phi[k] : 0.0;
      lm.c = std::max(lm.c, std::pow(ratio, 1.0 / k));
    }
    rep.members[q] = std::move(lm);
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Growth lemmas and prop-up.
// ---------------------------------------------------------------------------

namespace detail {

/// (value, mu-mass) pairs of the active space-time cells, layers k >= 1.
struct CellMass {
  std::vector<double> value, mass;
  std::vector<int> layer;
  double total = 0.0;
};

inline CellMass cell_masses(const Solution& s, const std::function<bool(std::size_t, int)>& in) {
  CellMass cm;
  const auto& g = s.grid;
  const double vol = g.cell_volume() * g.dt();
  std::vector<double> mu(s.nodes());
  for (std::size_t i = 0; i < s.nodes(); ++i) mu[i] = s.problem.w.mu(g.node(i));
  for (int k = 1; k <= g.steps; ++k)
    for (std::size_t i = 0; i < s.nodes(); ++i) {
      if (!s.active[i] || !in(i, k)) continue;
      cm.value.push_back(s.at(k, i));
      cm.mass.push_back(mu[i] * vol);
      cm.layer.push_back(k);
      cm.total += mu[i] * vol;
    }
  return cm;
}

/// Indices of cm sorted by value, descending (ties by index).
inline std::vector<std::size_t> order_desc(const CellMass& cm) {
  std::vector<std::size_t> idx(cm.value.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return cm.value[a] > cm.value[b]; });
  return idx;
}

}  // namespace detail

struct Growth1Row {
  int member = 0;
  std::uint64_t seed = 0;
  double delta0 = 0.0;
  double level = 0.0;     // M with u = v - M
  double fraction = 0.0;  // mu({u > 0} cap C_r) / mu(C_r), cell-exact
  double sup_r = 0.0, sup_half = 0.0, g = 0.0;
  double reach = -1.0;  // latest normalized time tau of a positive cell
};

struct Growth1Report {
  std::vector<Growth1Row> rows;  // member-major, deltas in the given order
  std::vector<double> deltas, median_g;
  std::vector<int> nontrivial;  // members with g > 0, per delta
  bool all_below_one() const {
    for (const auto& r : rows)
      if (!(r.g < 1.0)) return false;
    return true;
  }
  bool median_nondecreasing() const {
    for (std::size_t i = 1; i < median_g.size(); ++i)
      if (median_g[i] < median_g[i - 1]) return false;
    return true;
  }
};

/// Subsolutions u = v - M of L u = 0 on C_{r,mu}(Y), v evolved from localized
/// bumps with zero lateral data, M the lowest level whose positivity set has
/// mu-fraction <= delta0.
inline Growth1Report growth1_experiment(const EnsembleSpec& spec, double r,
                                        const std::vector<double>& deltas) {
  const int n = spec.dim();
  Growth1Report rep;
  rep.deltas = deltas;
  const std::size_t D = deltas.size();
  rep.rows.resize(spec.count * D);
  DataSpec bumps = spec.data;
  bumps.trig = false;
  bumps.floor = 0.0;
  bumps.bumps = std::max(1, bumps.bumps);
  const double half_depth = make_cylinder(spec.weight, spec.Y, 0.5 * r).depth;
  parallel_for(spec.count, spec.threads, [&](std::size_t q) {
    const int m = static_cast<int>(q);
    const std::uint64_t seed = spec.member_seed(m);
    const RandomData data = draw_data(n, seed, bumps);
    const auto run = normalized_run(
        spec.weight, spec.Y, r, spec.coeff.make(n, mix_seed(seed, 0xC0EF)),
        [data](const Point& xi) { return data(xi); },
        [](const Point&, double) { return 0.0; }, spec.cells, spec.scheme, spec.stretch);
    const Solution sol = solve(run.problem, run.grid);
    const double hd = run.z.depth(half_depth);
    auto in_half = [&](std::size_t i, int k) {
      return norm(run.xi[i]) < 0.5 && run.grid.time(k) > -hd;
    };
    const auto all = detail::cell_masses(sol, [](std::size_t, int) { return true; });
    const auto order = detail::order_desc(all);
    double vmax_half = -kInf;
    for (int k = 1; k <= run.grid.steps; ++k)
      for (std::size_t i = 0; i < sol.nodes(); ++i)
        if (sol.active[i] && in_half(i, k)) vmax_half = std::max(vmax_half, sol.at(k, i));
    for (std::size_t d = 0; d < D; ++d) {
      Growth1Row row;
      row.member = m;
      row.seed = seed;
      row.delta0 = deltas[d];
      // Largest prefix of the descending order with mass <= delta0 total.
      double acc = 0.0;
      std::size_t j = 0;
      while (j < order.size() && acc + all.mass[order[j]] <= deltas[d] * all.total) {
        acc += all.mass[order[j]];
        ++j;
      }
      if (j == 0)
        throw ConstructionFailure("density target " + fmt17(deltas[d]) +
                                  " is below one grid cell's mu-mass");
      row.level = j < order.size() ? all.value[order[j]] : std::min(0.0, all.value[order.back()]);
      // Ties at the level would put cells on both sides; step past them.
      double pos = 0.0;
      for (std::size_t i = 0; i < all.value.size(); ++i)
        if (all.value[i] > row.level) {
          pos += all.mass[i];
          row.reach = std::max(row.reach, run.grid.time(all.layer[i]));
        }
      row.fraction = pos / all.total;
      row.sup_r = std::max(0.0, all.value[order[0]] - row.level);
      row.sup_half = std::max(0.0, vmax_half - row.level);
      row.g = row.sup_r > 0 ? row.sup_half / row.sup_r : 0.0;
      rep.rows[q * D + d] = row;
    }
  });
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<double> gs;
    for (int m = 0; m < spec.count; ++m) gs.push_back(rep.rows[m * D + d].g);
    rep.median_g.push_back(median(gs));
    rep.nontrivial.push_back(static_cast<int>(std::count_if(gs.begin(), gs.end(), [](double g) { return g > 0; })));
  }
  return rep;
}

struct Growth3Row {
  int member = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double amplitude = 0.0;  // A with u = A v
  double fraction = 0.0;   // mu({u >= 1} cap Q) / mu(Q)
  double m = 0.0;          // inf over C_{r,mu}(Y) of u
};

struct Growth3Report {
  std::vector<Growth3Row> rows;
  std::vector<double> deltas, one_minus_beta;  // min_m per delta
  bool all_positive() const {
    for (const auto& r : rows)
      if (!(r.m > 0)) return false;
    return true;
  }
  bool nonincreasing() const {
    for (std::size_t i = 1; i < one_minus_beta.size(); ++i)
      if (one_minus_beta[i] > one_minus_beta[i - 1]) return false;
    return true;
  }
};

/// Nonnegative solutions on C_{2r,mu}(Y) from indicator-like data, scaled so
/// that u >= 1 on exactly the required mu-fraction 1 - delta of
/// Q = B_r x (s - 7/2 d, s - 3 d], d = r^2 (mu)_{B_2r}^{1/n}.
inline Growth3Report growth3_experiment(const EnsembleSpec& spec, double r,
                                        const std::vector<double>& deltas) {
  const int n = spec.dim();
  Growth3Report rep;
  rep.deltas = deltas;
  const std::size_t D = deltas.size();
  rep.rows.resize(spec.count * D);
  const double cr_depth = make_cylinder(spec.weight, spec.Y, r).depth;
  parallel_for(spec.count, spec.threads, [&](std::size_t q) {
    const int m = static_cast<int>(q);
    const std::uint64_t seed = spec.member_seed(m);
    DataSpec small = spec.data;
    const RandomData noise = draw_data(n, seed, small);
    Rng rng(mix_seed(seed, 0x63));
    const double edge = rng.uniform(0.55, 0.9), soft = rng.uniform(0.02, 0.1);
    auto data = [noise, edge, soft](const Point& xi) {
      return 0.5 * (1 - std::tanh((norm(xi) - edge) / soft)) + 0.1 * noise(xi);
    };
    const auto run = normalized_run(spec.weight, spec.Y, 2 * r,
                                    spec.coeff.make(n, mix_seed(seed, 0xC0EF)), data,
                                    [data](const Point& xi, double) { return data(xi); },
                                    spec.cells, spec.scheme, spec.stretch);
    const Solution sol = solve(run.problem, run.grid);
    const auto Q = detail::cell_masses(sol, [&](std::size_t i, int k) {
      const double t = run.grid.time(k);
      return norm(run.xi[i]) < 0.5 && t > -0.875 && t <= -0.75;
    });
    if (Q.value.empty()) throw ConstructionFailure("Q contains no grid cells");
    const auto order = detail::order_desc(Q);
    const double cd = run.z.depth(cr_depth);
    double vmin = kInf;
    for (int k = 1; k <= run.grid.steps; ++k)
      for (std::size_t i = 0; i < sol.nodes(); ++i)
        if (sol.active[i] && norm(run.xi[i]) < 0.5 && run.grid.time(k) > -cd)
          vmin = std::min(vmin, sol.at(k, i));
    for (std::size_t d = 0; d < D; ++d) {
      // Smallest prefix reaching mass (1 - delta) total; its last value is v*.
      double acc = 0.0;
      std::size_t j = 0;
      while (j < order.size() && acc < (1 - deltas[d]) * Q.total) acc += Q.mass[order[j++]];
      const double vstar = Q.value[order[std::max<std::size_t>(j, 1) - 1]];
      if (!(vstar > 0)) throw ConstructionFailure("data cannot reach u >= 1 on the target fraction");
      Growth3Row row;
      row.member = m;
      row.seed = seed;
      row.delta = deltas[d];
      row.amplitude = 1.0 / vstar;
      while (row.amplitude * vstar < 1.0) row.amplitude = std::nextafter(row.amplitude, kInf);
      double hit = 0.0;
      for (std::size_t i = 0; i < Q.value.size(); ++i)
        if (row.amplitude * Q.value[i] >= 1.0) hit += Q.mass[i];
      row.fraction = hit / Q.total;
      row.m = row.amplitude * vmin;
      rep.rows[q * D + d] = row;
    }
  });
  for (std::size_t d = 0; d < D; ++d) {
    double lo = kInf;
    for (int m = 0; m < spec.count; ++m) lo = std::min(lo, rep.rows[m * D + d].m);
    rep.one_minus_beta.push_back(lo);
  }
  return rep;
}

struct PropUpMember {
  int member = 0;
  std::uint64_t seed = 0;
  std::vector<double> rho, q;
  double gamma = 0.0;  // slope of log q against log(4r/rho)
  bool finite = false;
};

struct PropUpReport {
  std::vector<PropUpMember> members;
  double h = 1.0, tau = 0.0, sigma = 0.0;  // physical times
  bool pass() const {
    for (const auto& m : members)
      if (!m.finite || !(m.gamma >= 0)) return false;
    return true;
  }
};

/// Nonnegative solutions on C_{r,mu}(Y); tau = s - h depth (largest layer not
/// after it), sigma = s, z = y, rho in {r, r/2, r/4}.
inline PropUpReport propup_experiment(const EnsembleSpec& spec, double r, double h) {
  if (!(h > 0 && h <= 1)) throw NumericalError("prop-up spacing h must lie in (0, 1]");
  const int n = spec.dim();
  PropUpReport rep;
  rep.h = h;
  rep.members.resize(spec.count);
  const double depth = make_cylinder(spec.weight, spec.Y, r).depth;
  rep.sigma = spec.Y.t;
  parallel_for(spec.count, spec.threads, [&](std::size_t q) {
    const int m = static_cast<int>(q);
    const std::uint64_t seed = spec.member_seed(m);
    const RandomData data = draw_data(n, seed, spec.data);
    const auto run = normalized_run(
        spec.weight, spec.Y, r, spec.coeff.make(n, mix_seed(seed, 0xC0EF)),
        [data](const Point& xi) { return data(xi); },
        [data](const Point& xi, double) { return data(xi); }, spec.cells, spec.scheme,
        spec.stretch);
    int ktau = 0;
    for (int k = 0; k <= run.grid.steps; ++k)
      if (run.grid.time(k) <= -h) ktau = k;
    if (m == 0) rep.tau = run.z.to_t(run.grid.time(ktau));
    const Point o(n, 0.0);
    const std::vector<double> rhos{r, 0.5 * r, 0.25 * r};
    std::vector<std::vector<std::size_t>> balls;
    for (double rho : rhos) balls.push_back(run.ball_nodes(o, rho / r));
    const auto top = run.ball_nodes(o, 0.5);
    std::vector<double> inf_tau(rhos.size(), kInf);
    double inf_sigma = kInf;
    march(run.problem, run.grid, [&](int k, double, std::span<const double> u) {
      if (k == ktau)
        for (std::size_t j = 0; j < rhos.size(); ++j)
          for (auto i : balls[j]) inf_tau[j] = std::min(inf_tau[j], u[i]);
      if (k == run.grid.steps)
        for (auto i : top) inf_sigma = std::min(inf_sigma, u[i]);
    });
    if (!(inf_sigma > kUnderflowFloor))
      throw DegenerateInfimum("inf over B_{r/2}(y) at sigma underflows");
    PropUpMember pm;
    pm.member = m;
    pm.seed = seed;
    pm.rho = rhos;
    pm.finite = true;
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      pm.q.push_back(inf_tau[j] / inf_sigma);
      pm.finite = pm.finite && std::isfinite(pm.q.back()) && pm.q.back() > 0;
      lx.push_back(std::log(4 * r / rhos[j]));
      ly.push_back(std::log(pm.q.back()));
    }
    // log(4r/rho) is equally spaced, so the least-squares slope equals the
    // endpoint slope; this form keeps gamma >= 0 exact when q is monotone.
    pm.gamma = pm.finite ? (ly.back() - ly.front()) / (lx.back() - lx.front()) : 0.0;
    rep.members[q] = std::move(pm);
  });
  (void)depth;
  return rep;
}

// ---------------------------------------------------------------------------
// CSV output. Every table starts with a header row; numbers use 17 digits.
// ---------------------------------------------------------------------------

inline std::string harnack_members_csv(const HarnackReport& rep) {
  std::string s = "scale,member,seed,sup_u1,inf_u2,ratio,finite,comparison_ok\n";
  for (const auto& m : rep.members)
    s += fmt17(m.scale) + "," + std::to_string(m.member) + "," + std::to_string(m.seed) + "," +
         fmt17(m.sup_u1) + "," + fmt17(m.inf_u2) + "," + fmt17(m.ratio) + "," +
         (m.finite ? "1" : "0") + "," + (m.comparison_ok ? "1" : "0") + "\n";
  return s;
}

inline std::string harnack_scales_csv(const HarnackReport& rep) {
  std::string s =
      "r,max_ratio,min_ratio,median_ratio,members,finite_members,u1_t_lo,u1_t_hi,u2_t_lo,"
      "u2_t_hi,u1_nodes,u2_nodes,u2_inset_cells,wbmo_b4r,nodes,steps\n";
  for (const auto& c : rep.scales)
    s += fmt17(c.r) + "," + fmt17(c.max_ratio) + "," + fmt17(c.min_ratio) + "," +
         fmt17(c.median_ratio) + "," + std::to_string(c.members) + "," +
         std::to_string(c.finite_members) + "," + fmt17(c.u1_lo) + "," + fmt17(c.u1_hi) + "," +
         fmt17(c.u2_lo) + "," + fmt17(c.u2_hi) + "," + std::to_string(c.u1_nodes) + "," +
         std::to_string(c.u2_nodes) + "," + std::to_string(rep.u2_inset_cells) + "," +
         fmt17(c.wbmo) + "," + std::to_string(c.nodes) + "," + std::to_string(c.steps) + "\n";
  return s;
}

inline std::string beta_sweep_csv(const std::vector<BetaSweepRow>& rows) {
  std::string s = "beta,wbmo_b4r,max_ratio,median_ratio\n";
  for (const auto& r : rows)
    s += fmt17(r.beta) + "," + fmt17(r.wbmo) + "," + fmt17(r.max_ratio) + "," +
         fmt17(r.median_ratio) + "\n";
  return s;
}

inline std::string hoelder_csv(const HoelderReport& rep) {
  std::string s = "member,seed,k,tau,phi,alpha,raw_slope,contraction,seminorm,nonincreasing,fitted\n";
  for (const auto& m : rep.members)
    for (std::size_t k = 0; k < m.phi.size(); ++k)
      s += std::to_string(m.member) + "," + std::to_string(m.seed) + "," + std::to_string(k) +
           "," + fmt17(m.tau[k]) + "," + fmt17(m.phi[k]) + "," + fmt17(m.alpha) + "," +
           fmt17(m.raw_slope) + "," + fmt17(m.contraction) + "," + fmt17(m.seminorm) + "," +
           (m.nonincreasing ? "1" : "0") + "," + (m.fitted ? "1" : "0") + "\n";
  return s;
}

inline std::string liouville_csv(const LiouvilleReport& rep) {
  std::string s = "member,seed,k,radius,phi,c,pass\n";
  for (const auto& m : rep.members)
    for (std::size_t k = 0; k < m.phi.size(); ++k)
      s += std::to_string(m.member) + "," + std::to_string(m.seed) + "," + std::to_string(k) +
           "," + fmt17(m.radius[k]) + "," + fmt17(m.phi[k]) + "," + fmt17(m.c) + "," +
           (m.pass() ? "1" : "0") + "\n";
  return s;
}

inline std::string growth1_csv(const Growth1Report& rep) {
  std::string s = "member,seed,delta0,level,fraction,reach_tau,sup_r,sup_half,g\n";
  for (const auto& r : rep.rows)
    s += std::to_string(r.member) + "," + std::to_string(r.seed) + "," + fmt17(r.delta0) + "," +
         fmt17(r.level) + "," + fmt17(r.fraction) + "," + fmt17(r.reach) + "," +
         fmt17(r.sup_r) + "," + fmt17(r.sup_half) + "," + fmt17(r.g) + "\n";
  return s;
}

inline std::string growth3_csv(const Growth3Report& rep) {
  std::string s = "member,seed,delta,amplitude,fraction,m\n";
  for (const auto& r : rep.rows)
    s += std::to_string(r.member) + "," + std::to_string(r.seed) + "," + fmt17(r.delta) + "," +
         fmt17(r.amplitude) + "," + fmt17(r.fraction) + "," + fmt17(r.m) + "\n";
  return s;
}

inline std::string propup_csv(const PropUpReport& rep) {
  std::string s = "member,seed,rho,q,gamma,finite\n";
  for (const auto& m : rep.members)
    for (std::size_t j = 0; j < m.rho.size(); ++j)
      s += std::to_string(m.member) + "," + std::to_string(m.seed) + "," + fmt17(m.rho[j]) + "," +
           fmt17(m.q[j]) + "," + fmt17(m.gamma) + "," + (m.finite ? "1" : "0") + "\n";
  return s;
}

}  // namespace hlab
