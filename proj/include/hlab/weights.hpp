#pragma once
// Weights omega on R^n, the dual weight mu = omega^{-n}, ball averages,
// Muckenhoupt characteristics, weighted mean oscillation and doubling checks.

#include <optional>
#include <variant>

#include "hlab/common.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

struct Ball {
  Point center;
  double radius = 1.0;

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const { return ball_volume(dim(), radius); }
  bool contains(const Point& x) const { return dist(x, center) < radius; }
};

class WeightSpec;

struct ConstantWeight {
  double c = 1.0;
};

/// |x - center|^beta.
struct PowerWeight {
  double beta = 0.0;
  Point center;
};

/// One-dimensional samples, log-linear interpolation, constant extrapolation.
struct TabulatedWeight {
  std::vector<double> x;
  std::vector<double> w;
};

struct ProductWeight {
  std::vector<WeightSpec> factors;
};

/// Symbolic description of omega. Immutable after construction.
class WeightSpec {
 public:
  using Kind = std::variant<ConstantWeight, PowerWeight, TabulatedWeight, ProductWeight>;

  static WeightSpec constant(double c, int n) {
    if (!(c > 0) || !std::isfinite(c))
      throw InvalidWeight("constant weight requires c > 0, got " + fmt17(c));
    check_dim(n);
    return WeightSpec(ConstantWeight{c}, n, 0.0);
  }

  static WeightSpec power(double beta, Point center, int n) {
    check_dim(n);
    if (static_cast<int>(center.size()) != n)
      throw InvalidWeight("power weight center has wrong dimension");
    if (!(beta > -n && beta < 1.0))
      throw InvalidWeight("power weight exponent beta=" + fmt17(beta) +
                          " lies outside (-n, 1) = (" + std::to_string(-n) +
                          ", 1), the A_{1+1/n} range");
    return WeightSpec(PowerWeight{beta, std::move(center)}, n, 0.0);
  }

  static WeightSpec tabulated(std::vector<double> x, std::vector<double> w,
                              double singular_floor = 0.0) {
    if (x.size() != w.size() || x.size() < 2)
      throw InvalidWeight("tabulated weight needs at least two (x, w) samples");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1])) throw InvalidWeight("tabulated x must be strictly increasing");
    if (singular_floor < 0) throw InvalidWeight("singular_floor must be nonnegative");
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!(w[i] >= 0) || !std::isfinite(w[i]))
        throw InvalidWeight("tabulated samples must be finite and nonnegative");
      if (w[i] == 0 && i > 0 && w[i - 1] == 0)
        throw InvalidWeight("tabulated weight may only have isolated zeros");
      if (w[i] == 0 && singular_floor == 0)
        throw InvalidWeight("tabulated zero sample requires singular_floor > 0");
    }
    return WeightSpec(TabulatedWeight{std::move(x), std::move(w)}, 1, singular_floor);
  }

  static WeightSpec product(std::vector<WeightSpec> factors) {
    if (factors.empty()) throw InvalidWeight("product weight needs at least one factor");
    const int n = factors.front().dim();
    for (const auto& f : factors)
      if (f.dim() != n) throw InvalidWeight("product factors must share the dimension");
    return WeightSpec(ProductWeight{std::move(factors)}, n, 0.0);
  }

  int dim() const { return n_; }
  double singular_floor() const { return floor_; }
  const Kind& kind() const { return kind_; }

  std::string kind_name() const {
    switch (kind_.index()) {
      case 0: return "constant";
      case 1: return "power";
      case 2: return "tabulated";
      default: return "product";
    }
  }

  /// omega(x); +inf at a singular point of a negative power, 0 at a zero.
  double omega(const Point& x) const {
    return std::visit([&](const auto& k) { return eval(k, x); }, kind_);
  }

  /// omega(x)^q with the sentinel convention 0^q = inf, inf^q = 0 for q < 0.
  double pow(const Point& x, double q) const {
    const double w = omega(x);
    if (q == 1.0) return w;
    if (q == -1.0) return 1.0 / w;
    if (q == std::round(q) && std::fabs(q) <= 8) return ipow(w, static_cast<int>(q));
    return std::pow(w, q);
  }

  double mu(const Point& x) const { return pow(x, -n_); }

  /// Points where omega vanishes or blows up.
  std::vector<Point> singular_points() const {
    std::vector<Point> out;
    collect_singular(out);
    return out;
  }

  bool is_constant() const {
    if (std::holds_alternative<ConstantWeight>(kind_)) return true;
    if (auto* p = std::get_if<PowerWeight>(&kind_)) return p->beta == 0.0;
    if (auto* p = std::get_if<ProductWeight>(&kind_)) {
      for (const auto& f : p->factors)
        if (!f.is_constant()) return false;
      return true;
    }
    return false;
  }

 private:
  WeightSpec(Kind k, int n, double floor) : kind_(std::move(k)), n_(n), floor_(floor) {}

  static void check_dim(int n) {
    if (n < 1) throw InvalidWeight("dimension must be positive");
  }

  double eval(const ConstantWeight& k, const Point&) const { return k.c; }

  double eval(const PowerWeight& k, const Point& x) const {
    if (k.beta == 0.0) return 1.0;
    const double d = dist(x, k.center);
    if (d == 0.0) return k.beta < 0 ? kInf : 0.0;
    if (k.beta == 0.5) return std::sqrt(d);
    return std::pow(d, k.beta);
  }

  double eval(const TabulatedWeight& k, const Point& p) const {
    const double x = p[0];
    const auto& xs = k.x;
    auto clamp = [&](double v) { return std::max(v, floor_); };
    if (x <= xs.front()) return clamp(k.w.front());
    if (x >= xs.back()) return clamp(k.w.back());
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    const double th = (x - xs[i]) / (xs[i + 1] - xs[i]);
    const double l0 = std::log(clamp(k.w[i])), l1 = std::log(clamp(k.w[i + 1]));
    return std::exp(l0 + th * (l1 - l0));
  }

  double eval(const ProductWeight& k, const Point& x) const {
    double v = 1.0;
    for (const auto& f : k.factors) v *= f.omega(x);
    return v;
  }

  void collect_singular(std::vector<Point>& out) const {
    if (auto* p = std::get_if<PowerWeight>(&kind_)) {
      if (p->beta != 0.0) out.push_back(p->center);
    } else if (auto* p = std::get_if<ProductWeight>(&kind_)) {
      for (const auto& f : p->factors) f.collect_singular(out);
    }
  }

  Kind kind_;
  int n_ = 1;
  double floor_ = 0.0;
};

inline double eval_omega(const WeightSpec& w, const Point& x) { return w.omega(x); }
inline double eval_mu(const WeightSpec& w, const Point& x) { return w.mu(x); }

enum class MeanMethod { automatic, quadrature };

namespace detail {

// Integral of |u|^g over [a, b] (u = x - x0 shifted).
inline double power_interval_integral(double a, double b, double g) {
  if (!(b > a)) return 0.0;
  if (a < 0 && b > 0) {
    if (g <= -1.0) throw NonIntegrable("power singularity is not integrable on the ball");
    return (std::pow(-a, g + 1) + std::pow(b, g + 1)) / (g + 1);
  }
  if ((a == 0 || b == 0) && g <= -1.0)
    throw NonIntegrable("power singularity is not integrable on the ball");
  const double lo = std::min(std::fabs(a), std::fabs(b));
  const double hi = std::max(std::fabs(a), std::fabs(b));
  if (std::fabs(g + 1) < 1e-14) return std::log(hi / lo);
  return (std::pow(hi, g + 1) - std::pow(lo, g + 1)) / (g + 1);
}

// Closed-form pieces: constant factor c and a single power |x - x0|^beta.
struct Reduced {
  double c = 1.0;
  double beta = 0.0;
  Point center;
  bool has_power = false;
};

inline bool reduce(const WeightSpec& w, Reduced& out) {
  const auto& k = w.kind();
  if (auto* c = std::get_if<ConstantWeight>(&k)) {
    out.c *= c->c;
    return true;
  }
  if (auto* p = std::get_if<PowerWeight>(&k)) {
    if (p->beta == 0.0) return true;
    if (out.has_power) {
      if (out.center != p->center) return false;
      out.beta += p->beta;
      return true;
    }
    out.has_power = true;
    out.beta = p->beta;
    out.center = p->center;
    return true;
  }
  if (auto* p = std::get_if<ProductWeight>(&k)) {
    for (const auto& f : p->factors)
      if (!reduce(f, out)) return false;
    return true;
  }
  return false;
}

inline double tabulated_integral_pow(const TabulatedWeight& t, double floor, double q,
                                     double a, double b) {
  auto lw = [&](std::size_t i) { return std::log(std::max(t.w[i], floor)); };
  double total = 0.0;
  const auto& xs = t.x;
  if (a < xs.front()) {
    const double hi = std::min(b, xs.front());
    total += (hi - a) * std::exp(q * lw(0));
  }
  if (b > xs.back()) {
    const double lo = std::max(a, xs.back());
    total += (b - lo) * std::exp(q * lw(xs.size() - 1));
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = std::max(a, xs[i]), hi = std::min(b, xs[i + 1]);
    if (!(hi > lo)) continue;
    const double h = xs[i + 1] - xs[i];
    const double l0 = lw(i), dl = lw(i + 1) - l0;
    const double ta = (lo - xs[i]) / h, tb = (hi - xs[i]) / h;
    const double k = q * dl;
    if (std::fabs(k) < 1e-12) {
      total += (hi - lo) * std::exp(q * l0);
    } else {
      // h e^{q l0} (e^{k tb} - e^{k ta}) / k, written with expm1 for accuracy.
      total += h * std::exp(q * l0 + k * ta) * std::expm1(k * (tb - ta)) / k;
    }
  }
  return total;
}

}  // namespace detail

/// (omega^q)_B by closed form when one exists, or nullopt.
inline std::optional<double> closed_form_mean_pow(const WeightSpec& w, double q,
                                                  const Ball& b) {
  if (auto* t = std::get_if<TabulatedWeight>(&w.kind())) {
    const double a = b.center[0] - b.radius, e = b.center[0] + b.radius;
    return detail::tabulated_integral_pow(*t, w.singular_floor(), q, a, e) / (e - a);
  }
  detail::Reduced red;
  if (!detail::reduce(w, red)) return std::nullopt;
  const double cq = std::pow(red.c, q);
  if (!red.has_power || red.beta == 0.0) return cq;
  const double g = red.beta * q;
  const int n = w.dim();
  if (n == 1) {
    const double a = b.center[0] - b.radius - red.center[0];
    const double e = b.center[0] + b.radius - red.center[0];
    return cq * detail::power_interval_integral(a, e, g) / (e - a);
  }
  if (dist(b.center, red.center) == 0.0) {
    if (!(n + g > 0)) throw NonIntegrable("power singularity is not integrable on the ball");
    return cq * n * std::pow(b.radius, g) / (n + g);
  }
  return std::nullopt;
}

/// Mean of an arbitrary integrand over a ball, graded toward `singular`.
template <class F>
double ball_mean_fn(const F& f, const Ball& b, const std::vector<Point>& singular,
                    const quad::Options& opt = {}) {
  const int n = b.dim();
  if (n == 1) {
    std::vector<double> s;
    for (const auto& p : singular) s.push_back(p[0]);
    auto g = [&](double x) { return f(Point{x}); };
    const double a = b.center[0] - b.radius, e = b.center[0] + b.radius;
    return quad::integrate(g, a, e, s, opt) / (e - a);
  }
  if (n == 2) {
    const Point* pole = nullptr;
    double best = kInf;
    for (const auto& p : singular) {
      const double d = dist(p, b.center);
      if (d <= 2.0 * b.radius && d < best) {
        best = d;
        pole = &p;
      }
    }
    quad::Options o2 = opt;
    o2.rel_tol = std::max(opt.rel_tol, 1e-9);
    const double integral = pole ? quad::integrate_disc(f, b.center, b.radius, *pole, true, o2)
                                 : quad::integrate_disc(f, b.center, b.radius, b.center,
                                                        false, o2);
    return integral / b.volume();
  }
  throw NumericalError("ball quadrature is implemented for n in {1, 2} only");
}

/// (omega^q)_B.
inline double mean_pow(const WeightSpec& w, double q, const Ball& b,
                       MeanMethod method = MeanMethod::automatic,
                       const quad::Options& opt = {}) {
  if (method == MeanMethod::automatic) {
    if (auto v = closed_form_mean_pow(w, q, b)) return *v;
  }
  auto f = [&](const Point& x) { return w.pow(x, q); };
  return ball_mean_fn(f, b, w.singular_points(), opt);
}

enum class Field { omega, mu };

inline double field_exponent(const WeightSpec& w, Field f) {
  return f == Field::omega ? 1.0 : -static_cast<double>(w.dim());
}

/// (f)_B for f in {omega, mu}.
inline double ball_mean(const WeightSpec& w, Field f, const Ball& b,
                        MeanMethod method = MeanMethod::automatic,
                        const quad::Options& opt = {}) {
  return mean_pow(w, field_exponent(w, f), b, method, opt);
}

/// f(B) = integral of f over B.
inline double weighted_measure(const WeightSpec& w, Field f, const Ball& b,
                               MeanMethod method = MeanMethod::automatic,
                               const quad::Options& opt = {}) {
  return ball_mean(w, f, b, method, opt) * b.volume();
}

// ---------------------------------------------------------------------------
// Ball families for sup approximations. Seeds and radii are recorded so that
// every reported supremum can be reproduced.
// ---------------------------------------------------------------------------

struct BallSampler {
  std::string kind;  // "centered" or "random" or "custom"
  std::uint64_t seed = 0;
  std::vector<Ball> balls;

  std::string describe() const {
    return kind + " family, " + std::to_string(balls.size()) + " balls, seed " +
           std::to_string(seed);
  }
};

/// Balls centered at the singular points of w (or at the origin), radii
/// log-spaced over three decades starting at r_lo.
inline BallSampler centered_family(const WeightSpec& w, int count = 16, double r_lo = 1e-2) {
  BallSampler s{"centered", 0, {}};
  auto centers = w.singular_points();
  if (centers.empty()) centers.push_back(Point(w.dim(), 0.0));
  for (const auto& c : centers)
    for (int i = 0; i < count; ++i) {
      const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
      s.balls.push_back({c, r_lo * std::pow(1e3, t)});
    }
  return s;
}

/// Uniform centers in [lo, hi]^n, radii log-uniform over [r_lo, 1000 r_lo].
inline BallSampler random_family(int n, std::uint64_t seed, int count, double lo = -1.0,
                                 double hi = 1.0, double r_lo = 1e-2) {
  BallSampler s{"random", seed, {}};
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    Point c(n);
    for (auto& v : c) v = rng.uniform(lo, hi);
    s.balls.push_back({c, rng.log_uniform(r_lo, 1e3 * r_lo)});
  }
  return s;
}

struct ApEstimate {
  double p = 2.0;
  double value = 1.0;  // a lower bound on the true characteristic
  int ball_count = 0;
  std::string method;  // "centered-closed-form" or "sampled-sup"
  Ball argmax;
};

/// Product (sigma)_B (sigma^{-1/(p-1)})_B^{p-1} on one ball.
inline double ap_product(const WeightSpec& w, double p, const Ball& b,
                         MeanMethod method = MeanMethod::automatic,
                         const quad::Options& opt = {}) {
  const double a = mean_pow(w, 1.0, b, method, opt);
  const double d = mean_pow(w, -1.0 / (p - 1.0), b, method, opt);
  return a * std::pow(d, p - 1.0);
}

/// Sup of the A_p product over the sampled balls: a lower bound on [w]_{A_p}.
inline ApEstimate ap_characteristic(const WeightSpec& w, double p, const BallSampler& sampler,
                                    const quad::Options& opt = {}) {
  if (!(p > 1.0)) throw NumericalError("ap_characteristic requires p > 1");
  if (sampler.balls.empty()) throw NumericalError("ap_characteristic needs a nonempty sampler");
  ApEstimate est;
  est.p = p;
  est.value = -kInf;
  bool all_closed = true;
  for (const auto& b : sampler.balls) {
    if (!closed_form_mean_pow(w, 1.0, b)) all_closed = false;
    const double v = ap_product(w, p, b, MeanMethod::automatic, opt);
    if (v > est.value) {
      est.value = v;
      est.argmax = b;
    }
  }
  // Hoelder forces the product to be >= 1; anything below is rounding noise.
  if (est.value < 1.0 - 1e-9)
    throw NumericalError("A_p product below 1: quadrature is inaccurate");
  est.value = std::max(est.value, 1.0);
  est.ball_count = static_cast<int>(sampler.balls.size());
  est.method = (sampler.kind == "centered" && all_closed) ? "centered-closed-form"
                                                          : "sampled-sup";
  return est;
}

struct DualityResult {
  double product;  // (omega)_B (mu)_B^{1/n}
  double bound;    // current A_{1+1/n} estimate
};

inline DualityResult duality_check(const WeightSpec& w, const Ball& b, const ApEstimate& est,
                                   MeanMethod method = MeanMethod::automatic) {
  const int n = w.dim();
  const double om = ball_mean(w, Field::omega, b, method);
  const double mu = ball_mean(w, Field::mu, b, method);
  return {om * std::pow(mu, 1.0 / n), est.value};
}

/// [[omega]]_{B, omega}: mean oscillation of omega against omega^{-n} dx.
inline double wbmo_ball(const WeightSpec& w, const Ball& b, const quad::Options& opt = {}) {
  const int n = w.dim();
  if (w.is_constant()) return 0.0;
  const double m = ball_mean(w, Field::omega, b);
  auto f = [&](const Point& x) {
    const double om = w.omega(x);
    return ipow(std::fabs(om - m), n + 1) / ipow(om, n);
  };
  std::vector<Point> sing = w.singular_points();
  // Kinks where omega crosses its mean are handled by the adaptive rule.
  const double osc_mean = ball_mean_fn(f, b, sing, opt);
  const double ratio = osc_mean / m;  // (1/omega(B)) * integral
  return std::pow(std::max(ratio, 0.0), 1.0 / (n + 1));
}

/// Max of wbmo_ball over the sampled balls contained in `domain`.
inline double wbmo_sup(const WeightSpec& w, const Ball& domain, const BallSampler& sampler,
                       const quad::Options& opt = {}) {
  double best = 0.0;
  int used = 0;
  for (const auto& b : sampler.balls) {
    if (dist(b.center, domain.center) + b.radius > domain.radius * (1 + 1e-12)) continue;
    best = std::max(best, wbmo_ball(w, b, opt));
    ++used;
  }
  if (used == 0) throw NumericalError("wbmo_sup: no sampled ball lies inside the domain");
  return best;
}

struct DoublingResult {
  double ratio;  // mu(B_{2R}) / mu(B_R)
  double bound;  // 2^{n(n+1)} K0^n
};

inline DoublingResult doubling_check(const WeightSpec& w, const Ball& b, double K0) {
  const int n = w.dim();
  const double inner = weighted_measure(w, Field::mu, b);
  const double outer = weighted_measure(w, Field::mu, Ball{b.center, 2.0 * b.radius});
  return {outer / inner, std::pow(2.0, n * (n + 1)) * std::pow(K0, n)};
}

}  // namespace hlab
