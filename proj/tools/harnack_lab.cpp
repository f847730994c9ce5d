// harnack-lab: weight diagnostics, geometry tables, covering checks, solves
// and ensemble experiments. CSV files are the contract; SVG plots are extra.
//
// Exit codes: 0 all assertions pass, 2 config or I/O error, 3 numerical
// error, 4 assertion failure. Assertion outcomes are also written to
// <command>_assertions.csv in the output directory.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "hlab/hlab.hpp"

namespace fs = std::filesystem;
using namespace hlab;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool plots = false;
  std::optional<double> tol_quad;
  std::optional<int> threads;

  int thread_count() const {
    if (std::getenv("HARNACK_LAB_THREADS")) return default_threads();
    return threads ? std::max(1, *threads) : 1;
  }
};

struct Assertion {
  std::string name;
  double value, threshold;
  bool pass;
};

class Output {
 public:
  Output(const Globals& g, std::string command) : dir_(g.out), command_(std::move(command)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error("cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) const {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << content;
    if (!os) throw Error("write failed for " + path.string());
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void check(std::string name, double value, double threshold, bool pass) {
    checks_.push_back({std::move(name), value, threshold, pass});
  }

  /// Writes the assertion table; returns the exit code.
  int finish(std::uint64_t seed) const {
    std::string s = "assertion,value,threshold,pass,seed\n";
    bool ok = true;
    for (const auto& a : checks_) {
      s += a.name + "," + fmt17(a.value) + "," + fmt17(a.threshold) + "," + (a.pass ? "1" : "0") +
           "," + std::to_string(seed) + "\n";
      ok = ok && a.pass;
      std::cout << (a.pass ? "PASS " : "FAIL ") << command_ << ": " << a.name << " = "
                << fmt17(a.value) << " (threshold " << fmt17(a.threshold) << ")\n";
    }
    write(command_ + "_assertions.csv", s);
    return ok ? 0 : 4;
  }

 private:
  fs::path dir_;
  std::string command_;
  std::vector<Assertion> checks_;
};

std::string point_columns(const char* prefix, int n) {
  std::string s;
  for (int a = 0; a < n; ++a) s += std::string(",") + prefix + std::to_string(a + 1);
  return s;
}

std::string point_values(const Point& p) {
  std::string s;
  for (double v : p) s += "," + fmt17(v);
  return s;
}

// ---------------------------------------------------------------------------

int cmd_weights(const Globals& g, const std::string& spec, const std::string& balls, int count) {
  const auto w = parse_weight(Config::load(spec));
  const int n = w.dim();
  const std::uint64_t seed = g.seed.value_or(1);
  BallSampler sampler;
  if (balls == "centered") sampler = centered_family(w, count);
  else if (balls == "random") sampler = random_family(n, seed, count);
  else throw ParseError("--balls must be centered or random, got '" + balls + "'");
  const double p = 1.0 + 1.0 / n;
  const auto est = ap_characteristic(w, p, sampler);
  Output out(g, "weights");
  std::string csv = "ball" + point_columns("c", n) +
                    ",radius,omega_mean,mu_mean,duality_product,ap_bound,wbmo,duality_pass,seed\n";
  bool all = true;
  double worst = 0.0, wbmo_max = 0.0;
  for (std::size_t i = 0; i < sampler.balls.size(); ++i) {
    const auto& b = sampler.balls[i];
    const double om = ball_mean(w, Field::omega, b), mu = ball_mean(w, Field::mu, b);
    const auto d = duality_check(w, b, est);
    const double bmo = wbmo_ball(w, b);
    const bool ok = d.product <= d.bound * (1 + 1e-9);
    all = all && ok;
    worst = std::max(worst, d.product / d.bound);
    wbmo_max = std::max(wbmo_max, bmo);
    csv += std::to_string(i) + point_values(b.center) + "," + fmt17(b.radius) + "," + fmt17(om) +
           "," + fmt17(mu) + "," + fmt17(d.product) + "," + fmt17(d.bound) + "," + fmt17(bmo) +
           "," + (ok ? "1" : "0") + "," + std::to_string(seed) + "\n";
  }
  out.write("weights.csv", csv);
  out.check("duality_product_over_ap_bound", worst, 1.0 + 1e-9, all);
  if (w.is_constant()) out.check("wbmo_constant_weight", wbmo_max, 0.0, wbmo_max == 0.0);
  std::cout << "A_" << fmt17(p) << " estimate " << fmt17(est.value) << " (" << est.method << ", "
            << sampler.describe() << ")\n";
  return out.finish(seed);
}

int cmd_geometry(const Globals& g, const std::string& spec, int cylinders, int triples,
                 int inclusions) {
  const auto w = parse_weight(Config::load(spec));
  const int n = w.dim();
  const std::uint64_t seed = g.seed.value_or(1);
  Output out(g, "geometry");
  const auto meas = cylinder_measure_sweep(w, mix_seed(seed, 1), cylinders);
  std::string csv = "cylinder" + point_columns("y", n) + ",s,r,depth,mu_measure,mu_measure_direct,rel_err,seed\n";
  for (std::size_t i = 0; i < meas.rows.size(); ++i) {
    const auto& r = meas.rows[i];
    csv += std::to_string(i) + point_values(r.Y.x) + "," + fmt17(r.Y.t) + "," + fmt17(r.r) + "," +
           fmt17(r.depth) + "," + fmt17(r.formula) + "," + fmt17(r.direct) + "," +
           fmt17(r.rel_err) + "," + std::to_string(seed) + "\n";
  }
  out.write("geometry.csv", csv);
  const auto quasi = quasi_metric_sweep(w, mix_seed(seed, 2), triples, 2.0, true);
  std::string q = "triple,rho_xy,rho_yz,rho_xz,theta_xy,triangle_factor,rho_over_theta\n";
  for (std::size_t i = 0; i < quasi.rows.size(); ++i) {
    const auto& r = quasi.rows[i];
    q += std::to_string(i) + "," + fmt17(r.rho_xy) + "," + fmt17(r.rho_yz) + "," +
         fmt17(r.rho_xz) + "," + fmt17(r.theta_xy) + "," + fmt17(r.factor) + "," +
         fmt17(r.sandwich) + "\n";
  }
  out.write("quasi.csv", q);
  const auto inc = inclusion_sweep(w, mix_seed(seed, 3), inclusions);
  out.check("cylinder_measure_max_rel_err", meas.max_rel_err, meas.tolerance, meas.pass());
  out.check("quasi_triangle_max_factor", quasi.max_factor, 2.0,
            quasi.max_factor <= 2 * (1 + kRoundingSlack));
  out.check("rho_over_theta_min", quasi.min_sandwich, 1.0, quasi.min_sandwich >= 1.0);
  out.check("rho_over_theta_max", quasi.max_sandwich, std::sqrt(2.0),
            quasi.max_sandwich <= std::sqrt(2.0) * (1 + kRoundingSlack));
  out.check("inclusion_failures", inc.failed, 0.0, inc.pass());
  return out.finish(seed);
}

int cmd_covering(const Globals& g, const std::string& gamma, const std::string& spec,
                 double delta0, double K1, std::optional<double> K0_opt, int count) {
  if (gamma != "random") throw ParseError("--gamma supports 'random', got '" + gamma + "'");
  const auto w = spec.empty() ? WeightSpec::constant(1.0, 1) : parse_weight(Config::load(spec));
  const std::uint64_t seed = g.seed.value_or(1);
  const double K0 =
      K0_opt ? *K0_opt : ap_characteristic(w, 1.0 + 1.0 / w.dim(), centered_family(w)).value;
  Output out(g, "covering");
  std::string csv = covering_csv_header() + "\n";
  int failures = 0;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const CoveringGrid grid(random_gamma(s), w);
    const auto rep = build_E_and_hatE(grid, delta0, K0, K1, enumerate_candidates(grid),
                                      g.thread_count());
    csv += covering_csv_row(s, rep) + "\n";
    if (!rep.pass()) ++failures;
  }
  out.write("covering.csv", csv);
  out.check("covering_failures", failures, 0.0, failures == 0);
  return out.finish(seed);
}

int cmd_solve(const Globals& g, const std::string& config, const std::string& format, int stride,
              bool check) {
  const auto c = Config::load(config);
  const auto p = parse_problem(c);
  const auto grid = parse_grid(c, p);
  Output out(g, "solve");
  const auto sol = solve(p, grid);
  if (format == "csv" || format == "both") save_csv(out.path("solution.csv").string(), sol, stride);
  if (format == "binary" || format == "both") save_binary(out.path("solution.hlab").string(), sol);
  if (format != "csv" && format != "binary" && format != "both")
    throw ParseError("--format must be csv, binary or both");
  const auto mp = check_max_principle(sol);
  std::string s = "n,nodes,steps,dt,scheme,monotone,max_principle_checked,premises_hold,max_value\n";
  s += std::to_string(grid.n) + "," + std::to_string(grid.node_count()) + "," +
       std::to_string(grid.steps) + "," + fmt17(grid.dt()) + "," + to_string(grid.scheme) + "," +
       (sol.monotone ? "1" : "0") + "," + (mp.checked ? "1" : "0") + "," +
       (mp.premises_hold ? "1" : "0") + "," + fmt17(mp.max_value) + "\n";
  out.write("solve.csv", s);
  if (check) {
    out.check("scheme_monotone", sol.monotone ? 1 : 0, 1, sol.monotone);
    if (mp.checked && mp.premises_hold)
      out.check("max_principle_max_value", mp.max_value, mp.tolerance, mp.pass);
  }
  return out.finish(g.seed.value_or(0));
}

// ---------------------------------------------------------------------------

EnsembleSpec load_ensemble(const Globals& g, const Config& c) {
  auto spec = parse_ensemble(c);
  if (g.seed) spec.seed = *g.seed;
  spec.threads = g.thread_count();
  return spec;
}

int run_harnack(const Globals& g, const Config& c) {
  const auto spec = load_ensemble(g, c);
  const auto opt = parse_harnack_options(c);
  Output out(g, "harnack");
  const auto rep = harnack_experiment(spec, opt.inset);
  out.write("harnack.csv", harnack_members_csv(rep));
  out.write("harnack_scales.csv", harnack_scales_csv(rep));
  int bad_cmp = 0, infinite = 0;
  for (const auto& m : rep.members) {
    bad_cmp += !m.comparison_ok;
    infinite += !m.finite;
  }
  out.check("infinite_ratios", infinite, 0, infinite == 0);
  out.check("comparison_violations", bad_cmp, 0, bad_cmp == 0);
  if (opt.max_spread > 0 && rep.scales.size() > 1)
    out.check("scale_spread", rep.spread(), opt.max_spread, rep.spread() <= opt.max_spread);
  if (!opt.betas.empty()) out.write("beta_sweep.csv", beta_sweep_csv(harnack_beta_sweep(spec, opt.betas)));
  if (g.plots) {
    std::vector<Series> series;
    for (const auto& s : rep.scales) {
      Series ser{"r = " + fmt17(s.r), {}, {}, false};
      for (const auto& m : rep.members)
        if (m.scale == s.r) {
          ser.x.push_back(m.member);
          ser.y.push_back(m.ratio);
        }
      series.push_back(std::move(ser));
    }
    out.write("ratios.svg", svg_plot({"sup U1 / inf U2 per member", "member", "ratio", false, true},
                                     series));
  }
  return out.finish(spec.seed);
}

int run_hoelder(const Globals& g, const Config& c) {
  const auto spec = load_ensemble(g, c);
  const auto h = parse_hoelder_options(c);
  Output out(g, "hoelder");
  const auto rep = hoelder_experiment(spec, h.r, h.opt);
  out.write("hoelder.csv", hoelder_csv(rep));
  int increasing = 0, bad_alpha = 0;
  double amin = kInf, amax = 0;
  for (const auto& m : rep.members) {
    increasing += !m.nonincreasing;
    bad_alpha += !m.alpha_ok();
    if (m.fitted) {
      amin = std::min(amin, m.alpha);
      amax = std::max(amax, m.alpha);
    }
  }
  out.check("oscillation_increases", increasing, 0, increasing == 0);
  out.check("alpha_outside_unit_interval", bad_alpha, 0, bad_alpha == 0);
  std::cout << "alpha range [" << fmt17(amin) << ", " << fmt17(amax) << "]\n";
  if (g.plots) {
    std::vector<Series> series;
    for (const auto& m : rep.members)
      series.push_back({"member " + std::to_string(m.member), m.tau, m.phi, true});
    out.write("oscillation.svg",
              svg_plot({"oscillation on C_tau(X0)", "tau", "osc", true, true}, series));
  }
  return out.finish(spec.seed);
}

int run_growth(const Globals& g, const Config& c, const std::string& lemma) {
  const auto spec = load_ensemble(g, c);
  const auto gc = parse_growth_options(c);
  if (lemma != "all" && lemma != "first" && lemma != "third" && lemma != "propup")
    throw ParseError("--lemma must be first, third, propup or all");
  Output out(g, "growth");
  std::vector<Series> series;
  if (lemma == "all" || lemma == "first") {
    const auto rep = growth1_experiment(spec, gc.r, gc.first);
    out.write("growth1.csv", growth1_csv(rep));
    double gmax = 0;
    for (const auto& r : rep.rows) gmax = std::max(gmax, r.g);
    out.check("first_max_g", gmax, 1.0, rep.all_below_one());
    out.check("first_median_g_nondecreasing", rep.median_nondecreasing(), 1,
              rep.median_nondecreasing());
    series.push_back({"median g", rep.deltas, rep.median_g, true});
  }
  if (lemma == "all" || lemma == "third") {
    const auto rep = growth3_experiment(spec, gc.r, gc.third);
    out.write("growth3.csv", growth3_csv(rep));
    double mmin = kInf;
    for (const auto& r : rep.rows) mmin = std::min(mmin, r.m);
    out.check("third_min_inf", mmin, 0.0, rep.all_positive());
    out.check("third_floor_nonincreasing", rep.nonincreasing(), 1, rep.nonincreasing());
    series.push_back({"min inf C_r", rep.deltas, rep.one_minus_beta, true});
  }
  if (lemma == "all" || lemma == "propup") {
    const auto rep = propup_experiment(spec, gc.r, gc.h);
    out.write("propup.csv", propup_csv(rep));
    double gmin = kInf;
    for (const auto& m : rep.members) gmin = std::min(gmin, m.gamma);
    out.check("propup_min_gamma", gmin, 0.0, rep.pass());
  }
  if (g.plots && !series.empty())
    out.write("growth.svg", svg_plot({"growth lemmas", "delta", "value", true, true}, series));
  return out.finish(spec.seed);
}

int run_liouville(const Globals& g, const Config& c) {
  const auto spec = load_ensemble(g, c);
  const auto lc = parse_liouville_options(c);
  Output out(g, "liouville");
  const auto rep = liouville_experiment(spec, lc.r, lc.opt);
  out.write("liouville.csv", liouville_csv(rep));
  out.check("max_contraction", rep.max_c(), 1.0, rep.max_c() < 1.0);
  if (g.plots) {
    std::vector<Series> series;
    for (const auto& m : rep.members)
      series.push_back({"member " + std::to_string(m.member), m.radius, m.phi, true});
    out.write("liouville.svg",
              svg_plot({"oscillation on expanding cylinders", "radius", "osc", true, true}, series));
  }
  return out.finish(spec.seed);
}

int run_kind(const Globals& g, const std::string& kind, const std::string& config,
             const std::string& lemma) {
  const auto c = Config::load(config);
  if (kind == "harnack") return run_harnack(g, c);
  if (kind == "hoelder") return run_hoelder(g, c);
  if (kind == "growth") return run_growth(g, c, lemma);
  if (kind == "liouville") return run_liouville(g, c);
  throw ParseError("--kind must be harnack, hoelder, growth or liouville, got '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted parabolic Harnack laboratory"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  double tol = 0;
  int threads = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Base seed (echoed into outputs)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_flag("--plots", g.plots, "Also write SVG plots");
  auto* tol_opt = app.add_option("--tol-quad", tol, "Relative quadrature target")
                      ->check(CLI::PositiveNumber);
  auto* thr_opt = app.add_option("--threads", threads, "Worker threads (HARNACK_LAB_THREADS wins)")
                      ->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string spec, balls = "centered", config, gamma = "random", format = "csv", kind,
                    lemma = "all";
  int count = 16, cylinders = 100, triples = 10000, inclusions = 10000, stride = 1, gents = 1;
  double delta0 = 0.5, K1 = 3.0, K0 = 0.0;
  bool check = false;

  auto* w = app.add_subcommand("weights", "Ball means, duality products and WBMO");
  w->add_option("--spec", spec, "Weight config")->required();
  w->add_option("--balls", balls, "centered | random")->capture_default_str();
  w->add_option("--count", count, "Balls per family")->capture_default_str();

  auto* geo = app.add_subcommand("geometry", "Cylinder measures, quasi-metric and inclusion sweeps");
  geo->add_option("--spec", spec, "Weight config")->required();
  geo->add_option("--cylinders", cylinders)->capture_default_str();
  geo->add_option("--triples", triples)->capture_default_str();
  geo->add_option("--inclusions", inclusions)->capture_default_str();

  auto* cov = app.add_subcommand("covering", "Covering construction on random Gamma");
  cov->add_option("--gamma", gamma, "Gamma source (random)")->capture_default_str();
  cov->add_option("--spec", spec, "Weight config (n = 1; default omega = 1)");
  cov->add_option("--delta0", delta0)->capture_default_str();
  cov->add_option("--K1", K1)->capture_default_str();
  auto* k0_opt = cov->add_option("--K0", K0, "Doubling constant (default: A_{1+1/n} estimate)");
  cov->add_option("--count", gents, "Number of Gamma sets, seeds seed .. seed+count-1")
      ->capture_default_str();

  auto* sol = app.add_subcommand("solve", "Solve one problem and dump the solution");
  sol->add_option("--config", config)->required();
  sol->add_option("--format", format, "csv | binary | both")->capture_default_str();
  sol->add_option("--stride", stride, "CSV layer stride")->capture_default_str();
  sol->add_flag("--check", check, "Assert monotonicity and the maximum principle");

  std::map<std::string, CLI::App*> kinds;
  for (const char* k : {"harnack", "hoelder", "growth", "liouville"}) {
    auto* sub = app.add_subcommand(k, std::string("Run the ") + k + " experiment");
    sub->add_option("--config", config)->required();
    if (std::string(k) == "growth")
      sub->add_option("--lemma", lemma, "first | third | propup | all")->capture_default_str();
    kinds[k] = sub;
  }
  auto* exp = app.add_subcommand("experiment", "Run an experiment by kind");
  exp->add_option("--kind", kind)->required();
  exp->add_option("--config", config)->required();
  exp->add_option("--lemma", lemma, "growth only")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) g.seed = seed;
  if (*tol_opt) {
    g.tol_quad = tol;
    quad::default_rel_tol() = tol;
  }
  if (*thr_opt) g.threads = threads;

  try {
    if (w->parsed()) return cmd_weights(g, spec, balls, count);
    if (geo->parsed()) return cmd_geometry(g, spec, cylinders, triples, inclusions);
    if (cov->parsed())
      return cmd_covering(g, gamma, spec, delta0, K1,
                          *k0_opt ? std::optional<double>(K0) : std::nullopt, gents);
    if (sol->parsed()) return cmd_solve(g, config, format, stride, check);
    for (const auto& [k, sub] : kinds)
      if (sub->parsed()) return run_kind(g, k, config, lemma);
    if (exp->parsed()) return run_kind(g, kind, config, lemma);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
