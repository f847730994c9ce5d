#pragma once
// Analytic sub- and supersolutions used to validate the solver: the quadratic
// barrier of the first growth lemma and the slant-cylinder barrier
// v = e^{-lambda t} (r^2 - |x - t l|^2)^2.

#include "hlab/solver.hpp"

namespace hlab {

/// p = |x - y|^2 - (mu)_{B_r(y)}^{-1/n} (t - s) - 2 r^2. On the closure of
/// C_{r,mu}(Y) it is <= 0, and L p = -(mu)^{-1/n} - 2 omega tr(a) < 0.
struct FirstGrowthBarrier {
  WCylinder cyl;
  double inv_root_mu = 1.0;  // (mu)_{B_r(y)}^{-1/n}

  explicit FirstGrowthBarrier(const WCylinder& c)
      : cyl(c), inv_root_mu(std::pow(c.mu_mean, -1.0 / c.dim())) {}

  double operator()(const Point& x, double t) const {
    return dist2(x, cyl.Y.x) - inv_root_mu * (t - cyl.Y.t) - 2 * cyl.r * cyl.r;
  }
  /// Exact L p; centred differences reproduce it because p is quadratic in x
  /// and affine in t.
  double L(double omega, const Sym2& a) const { return -inv_root_mu - 2 * omega * a.trace(cyl.dim()); }
};

inline FirstGrowthBarrier first_growth_barrier(const WCylinder& c) { return FirstGrowthBarrier(c); }

/// Barrier on V_r(Y) = {|x - (t/s) y| < r, 0 < t < s}, with
/// y0 = y/2, R = (K^2/2 + 1) r, lambda = N1 K^2 (omega)_{B_R(y0)} / r^2,
/// N1 = N0^2 / (16 nu), N0 = 4 + 4n/nu + 8 nu.
struct SlantBarrier {
  SlantCylinder V{SpacetimePoint{{0.0}, 1.0}, 1.0};
  double nu = 0.5;
  double K = 1.0;
  Point y0;
  double R = 1.0;
  double omega_mean = 1.0;  // (omega)_{B_R(y0)}
  double mu_mean = 1.0;     // (mu)_{B_R(y0)}
  double N0 = 0.0, N1 = 0.0, lambda = 0.0;

  int dim() const { return static_cast<int>(V.Y.x.size()); }
  Point ell() const {
    Point l = V.Y.x;
    for (double& v : l) v /= V.Y.t;
    return l;
  }
  double w(const Point& x, double t) const {
    double s = 0.0;
    const Point l = ell();
    for (int i = 0; i < dim(); ++i) {
      const double d = x[i] - t * l[i];
      s += d * d;
    }
    return V.r * V.r - s;
  }
  double operator()(const Point& x, double t) const {
    const double ww = w(x, t);
    return std::exp(-lambda * t) * ww * ww;
  }
  /// Exact L v = e^{-lambda t}[-lambda w^2 + 4 l.(x - tl) w
  ///            - 8 omega (x - tl)^T a (x - tl) + 4 omega w tr a].
  double L(const Point& x, double t, double omega, const Sym2& a) const {
    const int n = dim();
    const Point l = ell();
    Point d(n);
    double ld = 0.0;
    for (int i = 0; i < n; ++i) {
      d[i] = x[i] - t * l[i];
      ld += l[i] * d[i];
    }
    const double quad = n == 1 ? a.a11 * d[0] * d[0]
                               : a.a11 * d[0] * d[0] + 2 * a.a12 * d[0] * d[1] + a.a22 * d[1] * d[1];
    const double ww = w(x, t);
    return std::exp(-lambda * t) *
           (-lambda * ww * ww + 4 * ld * ww - 8 * omega * quad + 4 * omega * ww * a.trace(n));
  }
  /// The perturbation g carrying omega - (omega)_{B_R(y0)}; L v <= g on V.
  double g(const Point& x, double t, double omega, const Sym2& a) const {
    const double dw = omega - omega_mean;
    const double ww = w(x, t);
    return std::exp(-lambda * t) *
           ((4 * dw * a.trace(dim()) + 8 * dw * nu) * ww - 8 * nu * V.r * V.r * dw);
  }
};

/// Builds the barrier with the smallest K >= 1 (found by fixed-point
/// iteration, since R depends on K) satisfying
/// K^{-1} r (mu)^{1/n}_{B_R(y0)} |y| <= s <= K r^2 (mu)^{1/n}_{B_R(y0)}.
inline SlantBarrier slant_barrier(const WeightSpec& w, const SlantCylinder& V, double nu) {
  const int n = static_cast<int>(V.Y.x.size());
  SlantBarrier b;
  b.V = V;
  b.nu = nu;
  b.y0 = V.Y.x;
  for (double& v : b.y0) v *= 0.5;
  const double s = V.Y.t, r = V.r, ynorm = norm(V.Y.x);
  auto needed = [&](double K, double& mu_mean) {
    const double R = (0.5 * K * K + 1) * r;
    mu_mean = ball_mean(w, Field::mu, Ball{b.y0, R});
    const double root = std::pow(mu_mean, 1.0 / n);
    return std::max({1.0, r * root * ynorm / s, s / (r * r * root)});
  };
  double K = 1.0, mu = 1.0;
  bool ok = false;
  for (int it = 0; it < 200 && !ok; ++it) {
    const double next = needed(K, mu);
    if (next <= K) {
      ok = true;
    } else {
      K = std::max(next, K * (1 + 1e-12));
    }
  }
  if (!ok) throw ConstructionFailure("no K satisfies the slant-cylinder condition");
  b.K = K;
  b.R = (0.5 * K * K + 1) * r;
  b.mu_mean = mu;
  b.omega_mean = ball_mean(w, Field::omega, Ball{b.y0, b.R});
  b.N0 = 4 + 4 * n / nu + 8 * nu;
  b.N1 = b.N0 * b.N0 / (16 * nu);
  b.lambda = b.N1 * K * K * b.omega_mean / (r * r);
  return b;
}

}  // namespace hlab
