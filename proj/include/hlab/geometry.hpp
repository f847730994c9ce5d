#pragma once
// Weighted parabolic cylinders, the height function phi_y, Theta_Y and the
// quasi-metric rho_omega.

#include "hlab/weights.hpp"

namespace hlab {

struct SpacetimePoint {
  Point x;
  double t = 0.0;

  bool operator==(const SpacetimePoint& o) const { return t == o.t && x == o.x; }
};

inline std::string fmt_spacetime(const SpacetimePoint& p) {
  std::string s = "(";
  for (double v : p.x) s += fmt17(v) + ",";
  return s + fmt17(p.t) + ")";
}

enum class BoundaryClass { interior, bottom, lateral, top, outside };

inline const char* to_string(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::interior: return "interior";
    case BoundaryClass::bottom: return "bottom";
    case BoundaryClass::lateral: return "lateral";
    case BoundaryClass::top: return "top";
    default: return "outside";
  }
}

/// C^h_{r,mu}(Y) = B_r(y) x (s - depth, s), depth = h r^2 (mu)_{B_r(y)}^{1/n}.
struct WCylinder {
  SpacetimePoint Y;
  double r = 1.0;
  double depth = 1.0;
  double h = 1.0;
  double mu_mean = 1.0;  // (mu)_{B_r(y)}
  WeightSpec weight = WeightSpec::constant(1.0, 1);

  int dim() const { return static_cast<int>(Y.x.size()); }
  double bottom() const { return Y.t - depth; }
  double top() const { return Y.t; }
  Ball ball() const { return {Y.x, r}; }
  /// Depth of the full-height cylinder, r^2 (mu)^{1/n}.
  double full_depth() const { return depth / h; }

  bool contains(const SpacetimePoint& X) const {
    return dist(X.x, Y.x) < r && X.t > bottom() && X.t < Y.t;
  }
};

inline WCylinder make_cylinder(const WeightSpec& w, const SpacetimePoint& Y, double r,
                               double h = 1.0) {
  if (!(r > 0)) throw NumericalError("cylinder radius must be positive");
  if (!(h > 0 && h <= 1)) throw NumericalError("cylinder height fraction must lie in (0, 1]");
  if (static_cast<int>(Y.x.size()) != w.dim())
    throw NumericalError("cylinder center has the wrong dimension");
  WCylinder c;
  c.Y = Y;
  c.r = r;
  c.h = h;
  c.weight = w;
  c.mu_mean = ball_mean(w, Field::mu, Ball{Y.x, r});
  c.depth = h * r * r * std::pow(c.mu_mean, 1.0 / w.dim());
  return c;
}

/// sigma_n^{-1/n} r mu(B_r(y))^{(n+1)/n}, scaled by h for short cylinders.
inline double cylinder_mu_measure(const WCylinder& c) {
  const int n = c.dim();
  const double muB = c.mu_mean * ball_volume(n, c.r);
  return c.h * std::pow(unit_ball_volume(n), -1.0 / n) * c.r * std::pow(muB, (n + 1.0) / n);
}

/// f(C) = f(B_r(y)) * depth, using the cached ball average for mu.
inline double weighted_measure(const WeightSpec& w, Field f, const WCylinder& c) {
  const double mean = f == Field::mu ? c.mu_mean : ball_mean(w, f, c.ball());
  return mean * c.ball().volume() * c.depth;
}

/// Independent route to mu(C): Cartesian iterated quadrature of mu over the
/// ball for both the depth and the spatial mass, then the time integral.
inline double cylinder_mu_measure_direct(const WCylinder& c, const quad::Options& opt = {}) {
  const WeightSpec& w = c.weight;
  const int n = c.dim();
  const auto sing = w.singular_points();
  double mass;
  if (n == 1) {
    std::vector<double> s;
    for (const auto& p : sing) s.push_back(p[0]);
    auto f = [&](double x) { return w.mu(Point{x}); };
    mass = quad::integrate(f, c.Y.x[0] - c.r, c.Y.x[0] + c.r, s, opt);
  } else if (n == 2) {
    quad::Options o2 = opt;
    o2.rel_tol = std::max(opt.rel_tol, 1e-9);
    const double cx = c.Y.x[0], cy = c.Y.x[1], r = c.r;
    auto outer = [&](double x) {
      const double hw = std::sqrt(std::max(0.0, r * r - (x - cx) * (x - cx)));
      std::vector<double> s;
      for (const auto& p : sing) s.push_back(p[1]);
      auto inner = [&](double y) { return w.mu(Point{x, y}); };
      return quad::integrate(inner, cy - hw, cy + hw, s, o2);
    };
    std::vector<double> s{cx - r, cx + r};
    for (const auto& p : sing) s.push_back(p[0]);
    mass = quad::integrate(outer, cx - r, cx + r, s, o2);
  } else {
    throw NumericalError("direct cylinder quadrature is implemented for n in {1, 2} only");
  }
  const double depth = c.h * c.r * c.r * std::pow(mass / ball_volume(n, c.r), 1.0 / n);
  // Time integral of the time-independent mass over (s - depth, s).
  auto slab = [&](double) { return mass; };
  return quad::adaptive(slab, c.Y.t - depth, c.Y.t, opt);
}

// ---------------------------------------------------------------------------
// phi_y and Theta_Y.
// ---------------------------------------------------------------------------

/// phi_y(tau) = tau^2 (mu)_{B_tau(y)}^{1/n}; strictly increasing, phi_y(0) = 0.
inline double phi(const WeightSpec& w, const Point& y, double tau) {
  if (tau == 0.0) return 0.0;
  const double m = ball_mean(w, Field::mu, Ball{y, tau});
  return tau * tau * std::pow(m, 1.0 / w.dim());
}

struct PhiInverseOptions {
  double rel_tol = 1e-10;  // tau_root = rel_tol * tau_max
  double tau_start = 1.0;
  int max_doublings = 200;
};

/// Smallest tau with phi_y(tau) >= hgt, up to tau_root. Returns the upper end
/// of the final bracket, so phi_y(result) >= hgt always.
inline double phi_inverse(const WeightSpec& w, const Point& y, double hgt,
                          const PhiInverseOptions& opt = {}) {
  if (!(hgt >= 0)) throw BracketFailure("phi_inverse requires a nonnegative height");
  if (hgt == 0.0) return 0.0;
  double hi = opt.tau_start;
  int k = 0;
  while (phi(w, y, hi) < hgt) {
    if (++k > opt.max_doublings)
      throw BracketFailure("phi_inverse: height " + fmt17(hgt) + " exceeds every computed phi");
    hi *= 2.0;
  }
  double lo = 0.0;
  // Shrink the bracket from below too, so that tiny heights converge.
  while (hi > 0 && phi(w, y, 0.5 * hi) >= hgt && k > -1100) {
    hi *= 0.5;
    --k;
  }
  lo = 0.5 * hi;
  const double tol = opt.rel_tol * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (phi(w, y, mid) >= hgt)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Theta_Y(X) = max{|x - y|, phi_y^{-1}(s - t)} for t <= s.
inline double theta(const SpacetimePoint& X, const SpacetimePoint& Y, const WeightSpec& w) {
  if (X.t > Y.t) throw NumericalError("theta requires t <= s");
  return std::max(dist(X.x, Y.x), phi_inverse(w, Y.x, Y.t - X.t));
}

/// rho_omega(X, Y); for t > s the roles are exchanged, rho(X, Y) = rho(Y, X).
inline double quasi_distance(const SpacetimePoint& X, const SpacetimePoint& Y,
                             const WeightSpec& w) {
  if (X.t > Y.t) return quasi_distance(Y, X, w);
  if (X == Y) return 0.0;
  const double dx = dist(X.x, Y.x);
  const double dt = Y.t - X.t;
  const double th = std::max(dx, phi_inverse(w, Y.x, dt));
  if (th == 0.0) return 0.0;
  double m = dx * dx;
  if (dt < kInf) {
    const double mu = ball_mean(w, Field::mu, Ball{Y.x, th});
    m = std::min(m, std::pow(mu, -1.0 / w.dim()) * dt);
  }
  return std::sqrt(th * th + m);
}

// ---------------------------------------------------------------------------
// Boundary classification and inclusion.
// ---------------------------------------------------------------------------

inline BoundaryClass boundary_classify(const WCylinder& c, const SpacetimePoint& X) {
  const double d = dist(X.x, c.Y.x);
  const double lo = c.bottom(), hi = c.top();
  if (d > c.r || X.t < lo || X.t > hi) return BoundaryClass::outside;
  if (X.t == lo) return BoundaryClass::bottom;
  if (X.t == hi) return BoundaryClass::top;
  if (d == c.r) return BoundaryClass::lateral;
  return BoundaryClass::interior;
}

/// Direct check of C_{theta r}(X0) being contained in C_r(Y). Containment of
/// open sets is decided on closures, with a relative slack of 1e-12 for
/// rounding in the cylinder depths.
inline bool inclusion_check(const WeightSpec& w, const SpacetimePoint& Y, double r,
                            double th, const SpacetimePoint& X0) {
  if (!(th > 0 && th < 1)) throw NumericalError("inclusion_check requires theta in (0, 1)");
  constexpr double slack = 1e-12;
  const WCylinder big = make_cylinder(w, Y, r);
  const WCylinder small = make_cylinder(w, X0, th * r);
  const bool space = dist(X0.x, Y.x) + th * r <= r * (1 + slack);
  const bool top = X0.t <= Y.t;
  const double scale = std::max({std::fabs(Y.t), std::fabs(X0.t), big.depth});
  const bool bottom = small.bottom() >= big.bottom() - slack * scale;
  return space && top && bottom;
}

/// B_radius(center) x (t_lo, t_hi).
struct BoxRegion {
  Point center;
  double radius = 1.0;
  double t_lo = 0.0, t_hi = 1.0;

  bool contains(const SpacetimePoint& X) const {
    return dist(X.x, center) < radius && X.t > t_lo && X.t < t_hi;
  }
  /// Closure containment of another such region.
  bool contains(const BoxRegion& o) const {
    return dist(o.center, center) + o.radius <= radius && o.t_lo >= t_lo && o.t_hi <= t_hi;
  }
};

/// C-hat = B_r(y) x (s + d, s + K1 d), d = r^2 (mu)_{B_r(y)}^{1/n}.
inline BoxRegion hat_cylinder(const WCylinder& c, double K1) {
  if (!(K1 > 1)) throw NumericalError("hat_cylinder requires K1 > 1");
  const double d = c.full_depth();
  return {c.Y.x, c.r, c.Y.t + d, c.Y.t + K1 * d};
}

/// U = B_{2r}(y) x (s, s + K1 d), containing C-hat.
inline BoxRegion u_cylinder(const WCylinder& c, double K1) {
  if (!(K1 > 1)) throw NumericalError("u_cylinder requires K1 > 1");
  const double d = c.full_depth();
  return {c.Y.x, 2.0 * c.r, c.Y.t, c.Y.t + K1 * d};
}

/// V_r(Y) = {(x, t): |x - (t/s) y| < r, 0 < t < s}.
struct SlantCylinder {
  SpacetimePoint Y;
  double r = 1.0;

  SlantCylinder(SpacetimePoint y, double radius) : Y(std::move(y)), r(radius) {
    if (!(Y.t > 0)) throw NumericalError("slant cylinder requires s > 0");
    if (!(r > 0)) throw NumericalError("slant cylinder radius must be positive");
  }

  Point axis_at(double t) const {
    Point c = Y.x;
    for (auto& v : c) v *= t / Y.t;
    return c;
  }

  bool contains(const SpacetimePoint& X) const {
    return X.t > 0 && X.t < Y.t && dist(X.x, axis_at(X.t)) < r;
  }

  /// bottom = base closure at t = 0, lateral = sheet S, top = t = s.
  BoundaryClass classify(const SpacetimePoint& X) const {
    if (X.t < 0 || X.t > Y.t) return BoundaryClass::outside;
    const double d = dist(X.x, axis_at(X.t));
    if (d > r) return BoundaryClass::outside;
    if (X.t == 0) return BoundaryClass::bottom;
    if (X.t == Y.t) return BoundaryClass::top;
    if (d == r) return BoundaryClass::lateral;
    return BoundaryClass::interior;
  }
};

inline bool slant_contains(const SlantCylinder& V, const SpacetimePoint& X) {
  return V.contains(X);
}

}  // namespace hlab
