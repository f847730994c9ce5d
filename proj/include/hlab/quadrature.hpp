#pragma once
// Adaptive quadrature for integrands with integrable point singularities.
//
// All rules are open (Gauss-Kronrod nodes never touch interval ends), so an
// integrand is never evaluated exactly at a declared singular point. Near such
// a point the interval is cut into dyadic shells whose contributions decay
// geometrically for power-law behaviour; the remaining tail is added by
// Richardson (geometric) extrapolation.

#include <array>
#include <queue>
#include <span>

#include "hlab/common.hpp"

namespace hlab::quad {

/// Process-wide default relative target; set once before any parallel work.
inline double& default_rel_tol() {
  static double v = 1e-10;
  return v;
}

struct Options {
  double rel_tol = default_rel_tol();
  double abs_tol = 1e-300;
  int max_intervals = 4000;
  int max_shells = 60;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    k += kWk[j] * (f1 + f2);
    if (j % 2 == 1) g += kWg[j / 2] * (f1 + f2);
  }
  k *= h;
  g *= h;
  return {a, b, k, std::fabs(k - g)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod on a smooth (or mildly kinked) integrand.
template <class F>
double adaptive(const F& f, double a, double b, const Options& opt) {
  if (!(b > a)) return 0.0;
  std::priority_queue<detail::Segment> heap;
  detail::Segment first = detail::gk15(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(opt.rel_tol * std::fabs(total), opt.abs_tol) &&
         count < opt.max_intervals) {
    detail::Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      heap.push(s);
      break;
    }
    detail::Segment l = detail::gk15(f, s.a, m);
    detail::Segment r = detail::gk15(f, m, s.b);
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  if (!std::isfinite(total)) throw NonIntegrable("quadrature produced a non-finite value");
  return total;
}

/// Integral of f over [a, a + len] where f may be singular at the endpoint a
/// (toward_left = true) or at a + len (toward_left = false).
template <class F>
double singular_end(const F& f, double a, double b, bool singular_at_a,
                    const Options& opt) {
  const double len = b - a;
  if (!(len > 0)) return 0.0;
  Options inner = opt;
  inner.rel_tol = opt.rel_tol * 0.1;
  double sum = 0.0;
  double prev = 0.0, prev_q = -1.0;
  const double scale = std::fabs(singular_at_a ? a : b);
  for (int k = 0; k <= opt.max_shells; ++k) {
    const double hi = len * std::ldexp(1.0, -k);
    const double lo = len * std::ldexp(1.0, -k - 1);
    // Below this width the shell endpoints lose relative accuracy; the
    // geometric tail estimate accounts for what is left.
    if (hi < 1e-8 * scale) {
      if (prev_q >= 0.0 && prev_q < 0.9999) return sum + prev * prev_q / (1.0 - prev_q);
      break;
    }
    const double u = singular_at_a ? a + lo : b - hi;
    const double v = singular_at_a ? a + hi : b - lo;
    const double c = adaptive(f, u, v, inner);
    sum += c;
    if (k >= 3) {
      if (c == 0.0 && prev == 0.0) return sum;
      const double q = prev != 0.0 ? c / prev : 1.0;
      const bool settled = prev_q > 0 && std::fabs(q - prev_q) < 1e-3 * std::max(1.0, q);
      if (q >= 0.0 && q < 0.9999 && settled) {
        const double tail = c * q / (1.0 - q);
        if (std::fabs(tail) <= std::max(opt.rel_tol * std::fabs(sum), opt.abs_tol))
          return sum + tail;
        if (k == opt.max_shells) return sum + tail;
      }
      prev_q = q;
    }
    prev = c;
  }
  throw NonIntegrable("integrand is not integrable near a singular point");
}

/// Integral of f over [a, b] with integrable point singularities at `singular`.
template <class F>
double integrate(const F& f, double a, double b, std::span<const double> singular,
                 const Options& opt = {}) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  std::vector<char> sing{0};
  for (double s : singular) {
    if (s > a && s < b) cuts.push_back(s);
  }
  std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(b);
  sing.assign(cuts.size(), 0);
  for (std::size_t i = 0; i < cuts.size(); ++i)
    for (double s : singular)
      if (s == cuts[i]) sing[i] = 1;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double u = cuts[i], v = cuts[i + 1];
    if (!(v > u)) continue;
    const bool su = sing[i], sv = sing[i + 1];
    if (su && sv) {
      const double m = 0.5 * (u + v);
      total += singular_end(f, u, m, true, opt) + singular_end(f, m, v, false, opt);
    } else if (su) {
      total += singular_end(f, u, v, true, opt);
    } else if (sv) {
      total += singular_end(f, u, v, false, opt);
    } else {
      total += adaptive(f, u, v, opt);
    }
  }
  return total;
}

/// Integral over the disc B_r(center) in R^2, in polar coordinates about
/// `pole`. When `pole_singular` is set the radial integrals are graded toward
/// the pole. The pole may lie inside, on, or outside the disc.
template <class F>
double integrate_disc(const F& f, const Point& center, double r, const Point& pole,
                      bool pole_singular, const Options& opt = {}) {
  const double dx = pole[0] - center[0];
  const double dy = pole[1] - center[1];
  const double d2 = dx * dx + dy * dy;
  const double r2 = r * r;
  const bool inside = d2 < r2;
  Options inner = opt;
  inner.rel_tol = opt.rel_tol * 0.1;
  const double zero[] = {0.0};
  std::span<const double> radial_sing =
      pole_singular ? std::span<const double>(zero) : std::span<const double>();

  auto ray = [&](double theta) {
    const double ex = std::cos(theta), ey = std::sin(theta);
    const double de = dx * ex + dy * ey;
    const double disc = de * de - (d2 - r2);
    if (disc <= 0) return 0.0;
    const double sq = std::sqrt(disc);
    double lo = -de - sq, hi = -de + sq;
    if (lo < 0) lo = 0;
    if (!(hi > lo)) return 0.0;
    auto radial = [&](double rho) {
      Point x{pole[0] + rho * ex, pole[1] + rho * ey};
      return f(x) * rho;
    };
    return integrate(radial, lo, hi, lo == 0 ? radial_sing : std::span<const double>(),
                     inner);
  };

  if (inside) {
    // Split the circle into quarters so the adaptive rule sees smooth pieces.
    double total = 0.0;
    for (int q = 0; q < 4; ++q)
      total += adaptive(ray, q * 0.5 * std::numbers::pi, (q + 1) * 0.5 * std::numbers::pi,
                        opt);
    return total;
  }
  // Pole on or outside the disc: rays hit the disc within half-angle asin(r/d)
  // of the direction toward the center.
  const double d = std::sqrt(d2);
  const double axis = std::atan2(-dy, -dx);
  const double half = d > r ? std::asin(r / d) : 0.5 * std::numbers::pi;
  // Endpoints carry square-root behaviour; grade toward both ends.
  auto left = [&](double th) { return ray(th); };
  double total = 0.0;
  const double mid = axis;
  const double ends[] = {axis - half, axis + half};
  total += integrate(left, axis - half, mid, std::span<const double>(ends, 1), opt);
  total += integrate(left, mid, axis + half, std::span<const double>(ends + 1, 1), opt);
  return total;
}

}  // namespace hlab::quad
