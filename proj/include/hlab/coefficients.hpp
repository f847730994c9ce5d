#pragma once
// Symmetric coefficient fields a_ij(x, t) for n in {1, 2}, with ellipticity
// nu |xi|^2 <= a xi.xi and |a_ij| <= 1/nu.

#include "hlab/common.hpp"

namespace hlab {

/// Symmetric 2x2 matrix; for n = 1 only a11 is used.
struct Sym2 {
  double a11 = 1.0, a12 = 0.0, a22 = 1.0;

  double trace(int n) const { return n == 1 ? a11 : a11 + a22; }
  double lambda_max(int n) const {
    if (n == 1) return a11;
    const double m = 0.5 * (a11 + a22);
    const double d = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    return m + d;
  }
  double lambda_min(int n) const {
    if (n == 1) return a11;
    const double m = 0.5 * (a11 + a22);
    const double d = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    return m - d;
  }
};

class CoefficientField {
 public:
  enum class Kind { constant, checkerboard, rotating, user };
  using Fn = std::function<Sym2(const Point&, double)>;

  static CoefficientField constant(Sym2 a, int n, double nu) {
    CoefficientField f(Kind::constant, n, nu);
    f.value_ = a;
    f.check_at(a);
    return f;
  }

  static CoefficientField identity(int n, double nu = 0.5) { return constant(Sym2{}, n, nu); }

  /// Piecewise constant on cells of size (cell_x, cell_t) anchored at
  /// (origin, t_origin). Each cell receives seeded diagonal entries in
  /// [nu, 1/nu] and an off-diagonal with |a12| <= (min(a11, a22) - nu) / 2,
  /// so the 7-point stencil is monotone on square meshes.
  static CoefficientField checkerboard(int n, double nu, std::uint64_t seed, double cell_x,
                                       double cell_t, Point origin, double t_origin,
                                       bool time_dependent = true) {
    CoefficientField f(Kind::checkerboard, n, nu);
    f.seed_ = seed;
    f.cell_x_ = cell_x;
    f.cell_t_ = cell_t;
    f.origin_ = std::move(origin);
    f.t_origin_ = t_origin;
    f.time_dependent_ = time_dependent;
    if (!(cell_x > 0) || (time_dependent && !(cell_t > 0)))
      throw NumericalError("checkerboard cells must have positive size");
    return f;
  }

  /// a = R(theta) diag(l1, l2) R(theta)^T with theta = theta0 + kx.x + kt t,
  /// l1 = 1, l2 = max(nu, 0.2): anisotropy 5 keeps square-mesh stencils monotone.
  /// For n = 1 the scalar (1 + nu)/2 + (1 - nu)/2 sin(theta) is used.
  static CoefficientField rotating(int n, double nu, double theta0, double kx, double kt) {
    CoefficientField f(Kind::rotating, n, nu);
    f.theta0_ = theta0;
    f.kx_ = kx;
    f.kt_ = kt;
    f.time_dependent_ = kt != 0.0;
    return f;
  }

  static CoefficientField user(int n, double nu, Fn fn, bool time_dependent = true) {
    CoefficientField f(Kind::user, n, nu);
    f.fn_ = std::move(fn);
    f.time_dependent_ = time_dependent;
    return f;
  }

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  double nu() const { return nu_; }
  bool time_independent() const { return !time_dependent_; }

  /// Upper bound for the largest eigenvalue over all (x, t).
  double lambda_bound() const {
    switch (kind_) {
      case Kind::constant: return value_.lambda_max(n_);
      case Kind::checkerboard:
        return n_ == 1 ? 1.0 / nu_ : 1.0 / nu_ + 0.5 * (1.0 / nu_ - nu_);
      case Kind::rotating: return 1.0;
      default: return n_ / nu_;
    }
  }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::constant: return "constant";
      case Kind::checkerboard: return "checkerboard";
      case Kind::rotating: return "rotating";
      default: return "user";
    }
  }

  Sym2 operator()(const Point& x, double t) const {
    switch (kind_) {
      case Kind::constant: return value_;
      case Kind::checkerboard: return checker(x, t);
      case Kind::rotating: return rotate(x, t);
      default: return fn_(x, t);
    }
  }

  /// True when nu |xi|^2 <= a xi.xi and |a_ij| <= 1/nu hold at (x, t).
  bool elliptic_at(const Point& x, double t) const { return elliptic(operator()(x, t)); }

  bool elliptic(const Sym2& a) const {
    const double inv = 1.0 / nu_ * (1 + 1e-12);
    const double lo = nu_ * (1 - 1e-12);
    if (n_ == 1) return a.a11 >= lo && a.a11 <= inv;
    return a.lambda_min(2) >= lo && std::fabs(a.a11) <= inv && std::fabs(a.a22) <= inv &&
           std::fabs(a.a12) <= inv;
  }

 private:
  CoefficientField(Kind k, int n, double nu) : kind_(k), n_(n), nu_(nu) {
    if (n != 1 && n != 2) throw NumericalError("coefficient fields support n in {1, 2}");
    if (!(nu > 0 && nu < 1)) throw NumericalError("ellipticity constant nu must lie in (0, 1)");
  }

  void check_at(const Sym2& a) const {
    if (!elliptic(a)) throw NumericalError("coefficient matrix violates the ellipticity bounds");
  }

  Sym2 checker(const Point& x, double t) const {
    std::uint64_t h = seed_;
    for (int i = 0; i < n_; ++i) {
      const auto c = static_cast<std::int64_t>(std::floor((x[i] - origin_[i]) / cell_x_));
      h = mix_seed(h, static_cast<std::uint64_t>(c) * 2 + 1);
    }
    if (time_dependent_) {
      const auto c = static_cast<std::int64_t>(std::floor((t - t_origin_) / cell_t_));
      h = mix_seed(h, static_cast<std::uint64_t>(c) * 2);
    }
    // Cell values come straight from the hash: cheap enough to recompute at
    // every node and step.
    auto unit = [h](std::uint64_t k) {
      return static_cast<double>(mix_seed(h, k) >> 11) * 0x1.0p-53;
    };
    auto between = [&](std::uint64_t k, double lo, double hi) { return lo + (hi - lo) * unit(k); };
    Sym2 a;
    a.a11 = between(0, nu_, 1.0 / nu_);
    if (n_ == 2) {
      a.a22 = between(1, nu_, 1.0 / nu_);
      const double room = 0.5 * (std::min(a.a11, a.a22) - nu_);
      a.a12 = between(2, -room, room);
    } else {
      a.a12 = 0.0;
      a.a22 = 0.0;
    }
    return a;
  }

  Sym2 rotate(const Point& x, double t) const {
    double th = theta0_ + kt_ * t;
    for (double v : x) th += kx_ * v;
    if (n_ == 1) return {0.5 * (1 + nu_) + 0.5 * (1 - nu_) * std::sin(th), 0.0, 0.0};
    const double l1 = 1.0, l2 = std::max(nu_, 0.2);
    const double c = std::cos(th), s = std::sin(th);
    return {l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
  }

  Kind kind_;
  int n_;
  double nu_;
  Sym2 value_;
  std::uint64_t seed_ = 0;
  double cell_x_ = 1.0, cell_t_ = 1.0, t_origin_ = 0.0;
  Point origin_;
  double theta0_ = 0.0, kx_ = 0.0, kt_ = 0.0;
  bool time_dependent_ = false;
  Fn fn_;
};

}  // namespace hlab
