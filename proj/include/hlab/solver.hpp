#pragma once
// Finite differences for u_t - omega(x) a_ij(x, t) D_ij u = f, n in {1, 2}.
//
// Space: a tensor grid of nodes on a box, both ends included. A node is
// active (the equation holds there) when its index is interior and the
// problem's mask accepts it; every other node carries boundary data. Time:
// steps + 1 layers, layer 0 holding initial data everywhere.

#include <Eigen/Sparse>
#include <array>
#include <optional>
#include <span>

#include "hlab/coefficients.hpp"
#include "hlab/geometry.hpp"

namespace hlab {

enum class Scheme { explicit_euler, implicit_euler };

inline const char* to_string(Scheme s) {
  return s == Scheme::explicit_euler ? "explicit" : "implicit";
}

/// Share of the CFL bound used when the step count is derived automatically.
/// Keeping the centre weight 1 - sum(lambda) >= 0.1 away from zero is what
/// makes the explicit update order preserving in floating point.
inline constexpr double kCflSafety = 0.9;

struct GridSpec {
  int n = 1;
  Point lo{0.0}, hi{1.0};
  std::vector<int> nodes{11};  // per axis, both ends included
  double t0 = 0.0, t1 = 1.0;
  int steps = 10;
  Scheme scheme = Scheme::explicit_euler;

  double dx(int axis) const { return (hi[axis] - lo[axis]) / (nodes[axis] - 1); }
  double dt() const { return (t1 - t0) / steps; }
  /// Exactly t1 on the last layer.
  double time(int k) const { return k == steps ? t1 : t0 + k * dt(); }
  std::size_t node_count() const {
    return n == 1 ? static_cast<std::size_t>(nodes[0])
                  : static_cast<std::size_t>(nodes[0]) * nodes[1];
  }
  /// Axis-0 index i and axis-1 index j of idx = i * nodes[1] + j.
  std::array<int, 2> coords(std::size_t idx) const {
    if (n == 1) return {static_cast<int>(idx), 0};
    return {static_cast<int>(idx / nodes[1]), static_cast<int>(idx % nodes[1])};
  }
  std::size_t index(int i, int j = 0) const {
    return n == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * nodes[1] + j;
  }
  double coord(int axis, int i) const {
    return i == nodes[axis] - 1 ? hi[axis] : lo[axis] + i * dx(axis);
  }
  Point node(std::size_t idx) const {
    const auto c = coords(idx);
    Point p(n);
    for (int a = 0; a < n; ++a) p[a] = coord(a, c[a]);
    return p;
  }
  bool interior_index(std::size_t idx) const {
    const auto c = coords(idx);
    for (int a = 0; a < n; ++a)
      if (c[a] == 0 || c[a] == nodes[a] - 1) return false;
    return true;
  }
  /// Lebesgue cell volume dx_1 ... dx_n.
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < n; ++a) v *= dx(a);
    return v;
  }

  void validate() const {
    if (n != 1 && n != 2) throw NumericalError("the solver supports n in {1, 2}");
    if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n ||
        static_cast<int>(nodes.size()) != n)
      throw NumericalError("grid box and node counts must match the dimension");
    for (int a = 0; a < n; ++a) {
      if (!(hi[a] > lo[a])) throw NumericalError("grid box must have positive extent");
      if (nodes[a] < 3) throw NumericalError("grid needs at least 3 nodes per axis");
    }
    if (!(t1 > t0)) throw NumericalError("grid time interval must have positive length");
    if (steps < 1) throw NumericalError("grid needs at least one time step");
  }
};

using SpaceTimeFn = std::function<double(const Point&, double)>;
using SpaceFn = std::function<double(const Point&)>;

struct Problem {
  WeightSpec w = WeightSpec::constant(1.0, 1);
  CoefficientField a = CoefficientField::identity(1);
  SpaceTimeFn f;                            // empty: f = 0
  SpaceFn initial = [](const Point&) { return 0.0; };
  SpaceTimeFn boundary;                     // empty: initial data, frozen in time
  std::function<bool(const Point&)> active; // empty: every interior index

  double rhs(const Point& x, double t) const { return f ? f(x, t) : 0.0; }
  double lateral(const Point& x, double t) const {
    return boundary ? boundary(x, t) : initial(x);
  }
};

namespace detail {

/// The discrete operator omega A_h at one active node: A_h u = sum c_j (u_j - u).
struct NodeStencil {
  std::uint32_t node = 0;
  double omega = 1.0;
  int count = 0;
  std::array<std::uint32_t, 8> nb{};
  std::array<double, 8> c{};
};

struct Stencils {
  std::vector<NodeStencil> nodes;
  bool monotone = true;
  double max_rate = 0.0;  // max over nodes of omega * sum c_j
};

inline void add(NodeStencil& s, std::size_t nb, double c) {
  if (c == 0.0) return;
  s.nb[s.count] = static_cast<std::uint32_t>(nb);
  s.c[s.count] = c;
  ++s.count;
}

/// Centred second differences; the cross derivative uses the two diagonal
/// nodes on the a12 side and subtracts their contribution from the axis
/// weights, so the stencil has 7 nonzero points and is monotone exactly when
/// a11/h^2 >= |a12|/(hk) and a22/k^2 >= |a12|/(hk).
inline NodeStencil stencil_at(const GridSpec& g, std::size_t idx, const Sym2& a, double omega) {
  NodeStencil s;
  s.node = static_cast<std::uint32_t>(idx);
  s.omega = omega;
  if (g.n == 1) {
    const double h = g.dx(0), c = a.a11 / (h * h);
    add(s, idx - 1, c);
    add(s, idx + 1, c);
    return s;
  }
  const double h = g.dx(0), k = g.dx(1);
  const std::size_t row = g.nodes[1];
  const double m = std::fabs(a.a12) / (h * k);
  add(s, idx - row, a.a11 / (h * h) - m);
  add(s, idx + row, a.a11 / (h * h) - m);
  add(s, idx - 1, a.a22 / (k * k) - m);
  add(s, idx + 1, a.a22 / (k * k) - m);
  // 2 a12 u_xy ~ (|a12| / hk) (u_{++} + u_{--} + 2u - axis neighbours), sign-mirrored for a12 < 0.
  if (a.a12 > 0) {
    add(s, idx + row + 1, m);
    add(s, idx - row - 1, m);
  } else if (a.a12 < 0) {
    add(s, idx + row - 1, m);
    add(s, idx - row + 1, m);
  }
  return s;
}

inline Stencils build_stencils(const Problem& p, const GridSpec& g,
                               const std::vector<std::size_t>& active,
                               const std::vector<double>& omega, double t) {
  Stencils out;
  out.nodes.reserve(active.size());
  for (std::size_t q = 0; q < active.size(); ++q) {
    const std::size_t idx = active[q];
    const Sym2 a = p.a(g.node(idx), t);
    NodeStencil s = stencil_at(g, idx, a, omega[q]);
    double sum = 0.0;
    for (int j = 0; j < s.count; ++j) {
      if (s.c[j] < 0) out.monotone = false;
      sum += s.c[j];
    }
    out.max_rate = std::max(out.max_rate, omega[q] * sum);
    out.nodes.push_back(s);
  }
  return out;
}

inline double apply(const NodeStencil& s, std::span<const double> u) {
  const double c0 = u[s.node];
  double acc = 0.0;
  for (int j = 0; j < s.count; ++j) acc += s.c[j] * (u[s.nb[j]] - c0);
  return acc;
}

}  // namespace detail

struct MarchInfo {
  bool monotone = true;
  double cfl = 0.0;  // dt sup(omega Lambda_max) sum 2/dx^2
  std::vector<char> active;
};

/// Active flags per node: interior index and accepted by the problem's mask.
inline std::vector<char> active_mask(const Problem& p, const GridSpec& g) {
  std::vector<char> m(g.node_count(), 0);
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = g.interior_index(i) && (!p.active || p.active(g.node(i)));
  return m;
}

/// dt sup(omega Lambda_max) sum(2/dx^2) with dt = 1. The sup runs over active
/// nodes; time-dependent fields use their global eigenvalue bound.
inline double cfl_rate(const Problem& p, const GridSpec& g, const std::vector<char>& active) {
  double sup = 0.0;
  const double lam_bound = p.a.time_independent() ? 0.0 : p.a.lambda_bound();
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) continue;
    const Point x = g.node(i);
    const double om = p.w.omega(x);
    const double lam = p.a.time_independent() ? p.a(x, g.t0).lambda_max(g.n) : lam_bound;
    sup = std::max(sup, om * lam);
  }
  double s = 0.0;
  for (int a = 0; a < g.n; ++a) s += 2.0 / (g.dx(a) * g.dx(a));
  return sup * s;
}

/// Time steps for the interval [t0, t1] at kCflSafety of the explicit bound,
/// divided by `stretch` (> 1 only makes sense for the implicit scheme).
inline int steps_for(const Problem& p, const GridSpec& g, double stretch = 1.0) {
  const double rate = cfl_rate(p, g, active_mask(p, g));
  const double s = std::ceil((g.t1 - g.t0) * rate / (kCflSafety * stretch));
  return std::max(1, static_cast<int>(s));
}

using LayerObserver = std::function<void(int k, double t, std::span<const double> layer)>;

/// Runs the scheme, handing every layer to `observer` (k = 0 .. steps).
inline MarchInfo march(const Problem& p, const GridSpec& g, const LayerObserver& observer) {
  g.validate();
  if (p.w.dim() != g.n || p.a.dim() != g.n)
    throw NumericalError("weight, coefficients and grid must share the dimension");
  MarchInfo info;
  info.active = active_mask(p, g);
  const std::size_t N = g.node_count();
  std::vector<std::size_t> act;
  std::vector<double> omega;
  std::vector<Point> xs(N);
  for (std::size_t i = 0; i < N; ++i) xs[i] = g.node(i);
  for (std::size_t i = 0; i < N; ++i) {
    if (!info.active[i]) continue;
    const double om = p.w.omega(xs[i]);
    if (!std::isfinite(om) || om < 0)
      throw NumericalError("omega is not finite at active node " + fmt_point(xs[i]));
    act.push_back(i);
    omega.push_back(om);
  }

  const double dt = g.dt();
  info.cfl = dt * cfl_rate(p, g, info.active);
  if (g.scheme == Scheme::explicit_euler && info.cfl > 1.0)
    throw CflViolation("explicit step violates CFL: dt sup(omega Lambda) sum 2/dx^2 = " +
                       fmt17(info.cfl) + " > 1");

  std::vector<double> u(N), next(N);
  for (std::size_t i = 0; i < N; ++i) {
    u[i] = p.initial(xs[i]);
    if (!std::isfinite(u[i])) throw NumericalError("initial data is not finite");
  }
  observer(0, g.t0, u);

  const bool frozen = p.a.time_independent();
  std::optional<detail::Stencils> fixed;
  if (frozen) fixed = detail::build_stencils(p, g, act, omega, g.t0);
  if (fixed) info.monotone = fixed->monotone;

  auto boundary_fill = [&](std::vector<double>& v, double t) {
    for (std::size_t i = 0; i < N; ++i)
      if (!info.active[i]) {
        v[i] = p.lateral(xs[i], t);
        if (!std::isfinite(v[i])) throw NumericalError("boundary data is not finite");
      }
  };

  // Implicit state: the factorization survives across steps when a is frozen.
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::SparseMatrix<double> M;
  bool factored = false;

  for (int k = 1; k <= g.steps; ++k) {
    const double t_prev = g.time(k - 1), t = g.time(k);
    if (g.scheme == Scheme::explicit_euler) {
      detail::Stencils local;
      const detail::Stencils& st = frozen ? *fixed : (local = detail::build_stencils(
                                                          p, g, act, omega, t_prev));
      if (!frozen) info.monotone = info.monotone && st.monotone;
      boundary_fill(next, t);
      for (std::size_t q = 0; q < act.size(); ++q) {
        const auto& s = st.nodes[q];
        double acc = 0.0;
        for (int j = 0; j < s.count; ++j) acc += (dt * s.omega * s.c[j]) * (u[s.nb[j]] - u[s.node]);
        double v = u[s.node] + acc;
        if (p.f) v += dt * p.f(xs[s.node], t_prev);
        next[s.node] = v;
      }
    } else {
      detail::Stencils local;
      const detail::Stencils& st =
          frozen ? *fixed : (local = detail::build_stencils(p, g, act, omega, t));
      if (!frozen) info.monotone = info.monotone && st.monotone;
      // Row of an active node: u - dt omega A_h u = u_prev + dt f(t).
      std::vector<double> b(N);
      boundary_fill(b, t);
      for (const auto& s : st.nodes) b[s.node] = u[s.node] + (p.f ? dt * p.f(xs[s.node], t) : 0.0);
      if (g.n == 1) {
        std::vector<double> lower(N, 0.0), diag(N, 1.0), upper(N, 0.0);
        for (const auto& s : st.nodes) {
          double sum = 0.0;
          for (int j = 0; j < s.count; ++j) {
            const double lam = dt * s.omega * s.c[j];
            sum += lam;
            (s.nb[j] < s.node ? lower : upper)[s.node] = -lam;
          }
          diag[s.node] = 1.0 + sum;
        }
        // Thomas elimination; the matrix is diagonally dominant.
        std::vector<double> cp(N), dp(N);
        cp[0] = upper[0] / diag[0];
        dp[0] = b[0] / diag[0];
        for (std::size_t i = 1; i < N; ++i) {
          const double den = diag[i] - lower[i] * cp[i - 1];
          cp[i] = upper[i] / den;
          dp[i] = (b[i] - lower[i] * dp[i - 1]) / den;
        }
        next[N - 1] = dp[N - 1];
        for (std::size_t i = N - 1; i-- > 0;) next[i] = dp[i] - cp[i] * next[i + 1];
        double res = 0.0, bn = 1.0;
        for (std::size_t i = 0; i < N; ++i) {
          double r = diag[i] * next[i] - b[i];
          if (i > 0) r += lower[i] * next[i - 1];
          if (i + 1 < N) r += upper[i] * next[i + 1];
          res = std::max(res, std::fabs(r));
          bn = std::max(bn, std::fabs(b[i]));
        }
        if (!(res <= 1e-10 * bn))
          throw LinearSolveFailure("tridiagonal solve residual " + fmt17(res) + " exceeds 1e-10");
      } else {
        if (!factored || !frozen) {
          std::vector<Eigen::Triplet<double>> trip;
          trip.reserve(N + 8 * act.size());
          std::vector<char> row_done(N, 0);
          for (const auto& s : st.nodes) {
            double sum = 0.0;
            for (int j = 0; j < s.count; ++j) {
              const double lam = dt * s.omega * s.c[j];
              sum += lam;
              trip.emplace_back(s.node, s.nb[j], -lam);
            }
            trip.emplace_back(s.node, s.node, 1.0 + sum);
            row_done[s.node] = 1;
          }
          for (std::size_t i = 0; i < N; ++i)
            if (!row_done[i]) trip.emplace_back(i, i, 1.0);
          M.resize(N, N);
          M.setFromTriplets(trip.begin(), trip.end());
          M.makeCompressed();
          lu.compute(M);
          if (lu.info() != Eigen::Success)
            throw LinearSolveFailure("sparse LU factorization failed");
          factored = true;
        }
        const Eigen::Map<const Eigen::VectorXd> bv(b.data(), N);
        Eigen::VectorXd x = lu.solve(bv);
        const double res = (M * x - bv).lpNorm<Eigen::Infinity>();
        const double bn = std::max(1.0, bv.lpNorm<Eigen::Infinity>());
        if (lu.info() != Eigen::Success || !(res <= 1e-10 * bn))
          throw LinearSolveFailure("sparse solve residual " + fmt17(res) + " exceeds 1e-10");
        for (std::size_t i = 0; i < N; ++i) next[i] = x[i];
      }
    }
    for (double v : next)
      if (!std::isfinite(v)) throw NumericalError("solution became non-finite");
    u.swap(next);
    observer(k, t, u);
  }
  return info;
}

struct Solution {
  GridSpec grid;
  Problem problem;
  std::vector<char> active;
  std::vector<double> values;  // layer-major: values[k * node_count + idx]
  bool monotone = true;

  std::size_t nodes() const { return grid.node_count(); }
  double at(int k, std::size_t idx) const { return values[k * nodes() + idx]; }
  std::span<const double> layer(int k) const {
    return {values.data() + static_cast<std::size_t>(k) * nodes(), nodes()};
  }
};

inline Solution solve(const Problem& p, const GridSpec& g) {
  Solution s;
  s.grid = g;
  s.problem = p;
  s.values.reserve((g.steps + 1) * g.node_count());
  const auto info = march(p, g, [&](int, double, std::span<const double> layer) {
    s.values.insert(s.values.end(), layer.begin(), layer.end());
  });
  s.active = info.active;
  s.monotone = info.monotone;
  return s;
}

/// Grid function fn(x, t) on every node and layer, for checking analytic
/// sub- and supersolutions through discrete_L.
inline Solution sample(const Problem& p, const GridSpec& g, const SpaceTimeFn& fn) {
  g.validate();
  Solution s;
  s.grid = g;
  s.problem = p;
  s.active = active_mask(p, g);
  const std::size_t N = g.node_count();
  std::vector<Point> xs(N);
  for (std::size_t i = 0; i < N; ++i) xs[i] = g.node(i);
  s.values.resize((g.steps + 1) * N);
  for (int k = 0; k <= g.steps; ++k)
    for (std::size_t i = 0; i < N; ++i) s.values[k * N + i] = fn(xs[i], g.time(k));
  const auto st = detail::build_stencils(
      p, g, [&] {
        std::vector<std::size_t> a;
        for (std::size_t i = 0; i < N; ++i)
          if (s.active[i]) a.push_back(i);
        return a;
      }(),
      std::vector<double>(N, 1.0), g.t0);
  s.monotone = st.monotone;
  return s;
}

/// Layer at which the scheme evaluates the spatial operator for step k.
inline int operator_layer(const GridSpec& g, int k) {
  return g.scheme == Scheme::explicit_euler ? k - 1 : k;
}

/// L_h u at an active node and layer k >= 1:
/// (u^k - u^{k-1}) / dt - omega A_h u^l with l = k - 1 (explicit) or k (implicit).
inline double apply_L(const Solution& s, std::size_t idx, int k) {
  const auto& g = s.grid;
  const int l = operator_layer(g, k);
  const Point x = g.node(idx);
  const double om = s.problem.w.omega(x);
  const auto st = detail::stencil_at(g, idx, s.problem.a(x, g.time(l)), om);
  const double dudt = (s.at(k, idx) - s.at(k - 1, idx)) / g.dt();
  return dudt - om * detail::apply(st, s.layer(l));
}

/// Residual L_h u - f at an active node.
inline double discrete_L(const Solution& s, std::size_t idx, int k) {
  const auto& g = s.grid;
  return apply_L(s, idx, k) - s.problem.rhs(g.node(idx), g.time(operator_layer(g, k)));
}

struct MaxPrincipleReport {
  bool checked = false;        // false when the stencil is not monotone
  bool premises_hold = false;  // L_h u <= 0 inside, u <= 0 on the parabolic boundary
  double worst_premise = 0.0;  // largest L_h u or boundary value seen
  double max_value = -kInf;
  double tolerance = 0.0;
  std::size_t worst_node = 0;
  int worst_layer = 0;
  bool pass = false;
};

/// Checks u <= 0 everywhere given L_h u <= 0 at active nodes and u <= 0 on the
/// discrete parabolic boundary. The operator premise allows rounding noise of
/// relative size 1e-9 in units of max|u| / dt; the conclusion allows none
/// (explicit) or 1e-10 (implicit).
inline MaxPrincipleReport check_max_principle(const Solution& s) {
  MaxPrincipleReport rep;
  rep.tolerance = s.grid.scheme == Scheme::explicit_euler ? 0.0 : 1e-10;
  if (!s.monotone) return rep;
  rep.checked = true;
  const auto& g = s.grid;
  const std::size_t N = s.nodes();
  double umax = 0.0;
  for (double v : s.values) umax = std::max(umax, std::fabs(v));
  const double premise_tol = 1e-9 * umax / g.dt();
  bool ok = true;
  for (int k = 0; k <= g.steps; ++k)
    for (std::size_t i = 0; i < N; ++i) {
      const double v = s.at(k, i);
      if (v > rep.max_value) {
        rep.max_value = v;
        rep.worst_node = i;
        rep.worst_layer = k;
      }
      if (k == 0 || !s.active[i]) {
        if (v > 0) ok = false;
        rep.worst_premise = std::max(rep.worst_premise, v);
      } else {
        const double L = apply_L(s, i, k);
        if (L > premise_tol) ok = false;
        rep.worst_premise = std::max(rep.worst_premise, L);
      }
    }
  rep.premises_hold = ok;
  rep.pass = rep.max_value <= rep.tolerance;
  return rep;
}

struct AbpReport {
  double lhs = 0.0;         // sup u^+
  double rhs_factor = 0.0;  // R^{n/(n+1)} ||f^+||_{L^{n+1}(Omega^+, mu)}
  double ratio() const { return rhs_factor > 0 ? lhs / rhs_factor : (lhs > 0 ? kInf : 0.0); }
};

/// Omega^+ is the set of active nodes (layers k >= 1) where u > 0; each node
/// carries the space-time cell dx^n dt and density mu(x).
inline AbpReport abp_report(const Solution& s, double R) {
  const auto& g = s.grid;
  const int n = g.n;
  AbpReport rep;
  for (double v : s.values) rep.lhs = std::max(rep.lhs, v);
  const double cell = g.cell_volume() * g.dt();
  double sum = 0.0;
  for (std::size_t i = 0; i < s.nodes(); ++i) {
    if (!s.active[i]) continue;
    const Point x = g.node(i);
    const double mu = s.problem.w.mu(x);
    for (int k = 1; k <= g.steps; ++k) {
      if (!(s.at(k, i) > 0)) continue;
      const double fp = std::max(0.0, s.problem.rhs(x, g.time(operator_layer(g, k))));
      sum += ipow(fp, n + 1) * mu * cell;
    }
  }
  rep.rhs_factor = std::pow(R, n / (n + 1.0)) * std::pow(sum, 1.0 / (n + 1.0));
  return rep;
}

// ---------------------------------------------------------------------------
// Grid builders.
// ---------------------------------------------------------------------------

/// Smallest node count >= `nodes` on [lo, hi] with no node within 1e-6 dx of
/// any of the given coordinates.
inline int avoid_coordinates(double lo, double hi, int nodes, const std::vector<double>& bad) {
  for (int N = nodes; N < nodes + 64; ++N) {
    const double h = (hi - lo) / (N - 1);
    bool ok = true;
    for (double b : bad) {
      const double s = (b - lo) / h;
      if (s > -1 && s < N && std::fabs(s - std::round(s)) < 1e-6) ok = false;
    }
    if (ok) return N;
  }
  throw NumericalError("could not place grid nodes away from singular points");
}

inline std::vector<double> singular_coordinates(const WeightSpec& w, int axis) {
  std::vector<double> out;
  for (const auto& p : w.singular_points()) out.push_back(p[axis]);
  return out;
}

/// Box grid with node counts bumped so that no node sits on a singular point
/// coordinate of w, with the explicit CFL step count (times 1/stretch).
inline GridSpec box_grid(const Problem& p, Point lo, Point hi, std::vector<int> nodes, double t0,
                         double t1, Scheme scheme = Scheme::explicit_euler,
                         double stretch = 1.0) {
  GridSpec g;
  g.n = static_cast<int>(lo.size());
  g.lo = std::move(lo);
  g.hi = std::move(hi);
  g.nodes = std::move(nodes);
  g.t0 = t0;
  g.t1 = t1;
  g.scheme = scheme;
  for (int a = 0; a < g.n; ++a)
    g.nodes[a] = avoid_coordinates(g.lo[a], g.hi[a], g.nodes[a], singular_coordinates(p.w, a));
  g.steps = 1;
  g.validate();
  g.steps = steps_for(p, g, stretch);
  return g;
}

/// Grid for a cylinder: the box [y - r, y + r]^n over [s - depth, s], with at
/// least `cells` cells per radius, and active nodes |x - y| < r. Sets the mask
/// on `p` as a side effect.
inline GridSpec cylinder_grid(Problem& p, const WCylinder& c, int cells,
                              Scheme scheme = Scheme::explicit_euler, double stretch = 1.0) {
  const int n = c.dim();
  Point lo(n), hi(n);
  for (int a = 0; a < n; ++a) {
    lo[a] = c.Y.x[a] - c.r;
    hi[a] = c.Y.x[a] + c.r;
  }
  const Point y = c.Y.x;
  const double r = c.r;
  p.active = [y, r](const Point& x) { return dist(x, y) < r; };
  return box_grid(p, lo, hi, std::vector<int>(n, 2 * cells + 1), c.bottom(), c.top(), scheme,
                  stretch);
}

}  // namespace hlab
