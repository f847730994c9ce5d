#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hlab {

/// A point of R^n. Dimension is carried by the vector length.
using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors. Every failure mode that a caller may want to branch on gets its own
// type; all derive from Error so the CLI can map them onto exit codes.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration or input text that cannot be understood (CLI exit code 2).
struct ParseError : Error {
  using Error::Error;
};

/// Numerical failures (CLI exit code 3).
struct NumericalError : Error {
  using Error::Error;
};

struct InvalidWeight : NumericalError {
  using NumericalError::NumericalError;
};
struct NonIntegrable : NumericalError {
  using NumericalError::NumericalError;
};
struct BracketFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct EmptyFamily : NumericalError {
  using NumericalError::NumericalError;
};
struct CflViolation : NumericalError {
  using NumericalError::NumericalError;
};
struct LinearSolveFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct ConstructionFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct ResolutionTooCoarse : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateInfimum : NumericalError {
  using NumericalError::NumericalError;
};

// ---------------------------------------------------------------------------
// Small vector helpers.
// ---------------------------------------------------------------------------

inline double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(const Point& a, const Point& b) {
  if (a.size() == 1) return std::fabs(a[0] - b[0]);
  return std::sqrt(dist2(a, b));
}

inline double norm(const Point& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

/// Lebesgue measure of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  if (n == 1) return 2.0;
  if (n == 2) return std::numbers::pi;
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

inline double ball_volume(int n, double r) {
  return unit_ball_volume(n) * std::pow(r, n);
}

/// Integer power by repeated multiplication; exact under power-of-two scaling.
inline double ipow(double x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

/// Shortest round-trip representation is not needed; 17 significant digits is.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += fmt17(p[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Random numbers. mt19937_64 is specified bit-for-bit by the standard; the
// distributions in <random> are not, so uniform draws are built by hand to keep
// seeded outputs identical across standard libraries.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  /// Integer in [lo, hi].
  long long integer(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(engine_() % span);
  }
  double normal() {
    // Box-Muller, one value per call.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Derive an independent stream seed for ensemble member `index`.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Threading. Work item i always writes slot i, so results do not depend on
// scheduling.
// ---------------------------------------------------------------------------

inline int default_threads() {
  if (const char* env = std::getenv("HARNACK_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace hlab
