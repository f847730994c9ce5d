#pragma once
// Experiment configs. Sections:
//   [weight]        as for every other command
//   [coefficients]  kind, nu, a11/a12/a22, cell_x, cell_t, time_dependent,
//                   theta0, kx, kt (fields live in normalized coordinates;
//                   checkerboards are reseeded per member)
//   [ensemble]      count, seed, Y = (y..., s), scales, cells, scheme, stretch
//   [random_data]   degree, terms, bumps, floor, trig
//   [harnack]       inset, max_spread, betas
//   [hoelder]       r, kmax, min_nodes, samples
//   [growth]        r, first = (deltas), third = (deltas), h
//   [liouville]     r, K, margin, horizon, min_nodes

#include "hlab/config.hpp"
#include "hlab/experiments.hpp"

namespace hlab {

inline CoeffSpec parse_coeff_spec(const Config& c, const std::string& s = "coefficients") {
  CoeffSpec spec;
  if (!c.has_section(s)) return spec;
  c.check_keys(s, {"kind", "nu", "a11", "a12", "a22", "cell_x", "cell_t", "time_dependent",
                   "theta0", "kx", "kt"});
  spec.kind = c.get(s, "kind", "identity");
  if (spec.kind != "identity" && spec.kind != "constant" && spec.kind != "checkerboard" &&
      spec.kind != "rotating")
    throw ParseError(c.source() + ": unknown coefficient kind '" + spec.kind + "'");
  spec.nu = c.number(s, "nu", 0.5);
  spec.a = Sym2{c.number(s, "a11", 1.0), c.number(s, "a12", 0.0), c.number(s, "a22", 1.0)};
  spec.cell_x = c.number(s, "cell_x", 0.25);
  spec.cell_t = c.number(s, "cell_t", 0.25);
  spec.time_dependent = c.boolean(s, "time_dependent", true);
  spec.theta0 = c.number(s, "theta0", 0.0);
  spec.kx = c.number(s, "kx", 1.0);
  spec.kt = c.number(s, "kt", 0.0);
  return spec;
}

inline Scheme parse_scheme(const std::string& v, const std::string& where) {
  if (v == "explicit") return Scheme::explicit_euler;
  if (v == "implicit") return Scheme::implicit_euler;
  throw ParseError(where + ": scheme must be explicit or implicit, got '" + v + "'");
}

inline EnsembleSpec parse_ensemble(const Config& c) {
  EnsembleSpec e;
  e.weight = parse_weight(c);
  const int n = e.dim();
  e.coeff = parse_coeff_spec(c);
  e.coeff.make(n, 1);  // validates nu and the tensor now rather than per member
  const std::string s = "ensemble";
  if (c.has_section(s)) {
    c.check_keys(s, {"count", "seed", "Y", "scales", "cells", "scheme", "stretch"});
    e.count = static_cast<int>(c.integer(s, "count", 64));
    e.seed = static_cast<std::uint64_t>(c.integer(s, "seed", 1));
    const auto Y = c.list(s, "Y", Point(n + 1, 0.0));
    if (static_cast<int>(Y.size()) != n + 1)
      throw ParseError(c.source() + ": ensemble.Y needs n + 1 entries (space, then time)");
    e.Y = SpacetimePoint{Point(Y.begin(), Y.end() - 1), Y.back()};
    e.scales = c.list(s, "scales", {1.0});
    e.cells = static_cast<int>(c.integer(s, "cells", 32));
    e.scheme = parse_scheme(c.get(s, "scheme", "explicit"), c.source());
    e.stretch = c.number(s, "stretch", 1.0);
  }
  if (e.count < 1) throw ParseError(c.source() + ": ensemble.count must be positive");
  if (e.cells < 2) throw ParseError(c.source() + ": ensemble.cells must be at least 2");
  for (double r : e.scales)
    if (!(r > 0)) throw ParseError(c.source() + ": ensemble.scales must be positive");
  const std::string d = "random_data";
  if (c.has_section(d)) {
    c.check_keys(d, {"degree", "terms", "bumps", "floor", "trig"});
    e.data.degree = static_cast<int>(c.integer(d, "degree", 8));
    e.data.terms = static_cast<int>(c.integer(d, "terms", 4));
    e.data.bumps = static_cast<int>(c.integer(d, "bumps", 2));
    e.data.floor = c.number(d, "floor", 1e-6);
    e.data.trig = c.boolean(d, "trig", true);
  }
  return e;
}

struct HarnackOptions {
  int inset = 1;
  double max_spread = 0.0;  // 0: no spread assertion
  std::vector<double> betas;
};

inline HarnackOptions parse_harnack_options(const Config& c) {
  HarnackOptions o;
  const std::string s = "harnack";
  if (!c.has_section(s)) return o;
  c.check_keys(s, {"inset", "max_spread", "betas"});
  o.inset = static_cast<int>(c.integer(s, "inset", 1));
  o.max_spread = c.number(s, "max_spread", 0.0);
  o.betas = c.list(s, "betas", {});
  return o;
}

struct HoelderConfig {
  double r = 0.5;
  HoelderOptions opt;
};

inline HoelderConfig parse_hoelder_options(const Config& c) {
  HoelderConfig h;
  const std::string s = "hoelder";
  if (!c.has_section(s)) return h;
  c.check_keys(s, {"r", "kmax", "min_nodes", "samples"});
  h.r = c.number(s, "r", 0.5);
  h.opt.kmax = static_cast<int>(c.integer(s, "kmax", 2));
  h.opt.min_nodes = static_cast<int>(c.integer(s, "min_nodes", 8));
  h.opt.seminorm_samples = static_cast<int>(c.integer(s, "samples", 32));
  return h;
}

struct GrowthConfig {
  double r = 1.0;
  std::vector<double> first{0.01, 0.05, 0.2};
  std::vector<double> third{0.01, 0.05, 0.2};
  double h = 0.5;
};

inline GrowthConfig parse_growth_options(const Config& c) {
  GrowthConfig g;
  const std::string s = "growth";
  if (!c.has_section(s)) return g;
  c.check_keys(s, {"r", "first", "third", "h"});
  g.r = c.number(s, "r", 1.0);
  g.first = c.list(s, "first", g.first);
  g.third = c.list(s, "third", g.third);
  g.h = c.number(s, "h", 0.5);
  return g;
}

struct LiouvilleConfig {
  double r = 1.0;
  LiouvilleOptions opt;
};

inline LiouvilleConfig parse_liouville_options(const Config& c) {
  LiouvilleConfig l;
  const std::string s = "liouville";
  if (!c.has_section(s)) return l;
  c.check_keys(s, {"r", "K", "margin", "horizon", "min_nodes"});
  l.r = c.number(s, "r", 1.0);
  l.opt.K = static_cast<int>(c.integer(s, "K", 3));
  l.opt.margin = c.number(s, "margin", 1.25);
  l.opt.horizon = c.number(s, "horizon", 2.0);
  l.opt.min_nodes = static_cast<int>(c.integer(s, "min_nodes", 8));
  return l;
}

}  // namespace hlab
