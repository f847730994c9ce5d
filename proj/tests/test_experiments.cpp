#include <gtest/gtest.h>

#include "hlab/experiments.hpp"

using namespace hlab;

namespace {

EnsembleSpec small_spec(WeightSpec w, int count = 6) {
  EnsembleSpec s;
  s.weight = std::move(w);
  s.count = count;
  s.seed = 11;
  s.cells = 16;
  return s;
}

SpaceFn constant_fn(double c) {
  return [c](const Point&) { return c; };
}

}  // namespace

TEST(Normalization, ScaledWeightMatchesPhysical) {
  const auto w = WeightSpec::power(0.3, {0.1}, 1);
  const SpacetimePoint Y{{0.4}, 2.0};
  const auto z = normalize(w, Y, 0.5);
  for (double xi : {-0.9, -0.3, 0.2, 0.7}) {
    const double expect = w.omega(z.to_x({xi})) / z.omega_ref;
    EXPECT_NEAR(z.scaled.omega({xi}), expect, 1e-14 * expect);
  }
  // (mu~)_{B_1} = 1 by the choice of omega_ref.
  EXPECT_NEAR(ball_mean(z.scaled, Field::mu, Ball{{0.0}, 1.0}), 1.0, 1e-8);
  EXPECT_NEAR(z.D, make_cylinder(w, Y, 0.5).depth, 1e-12 * z.D);
}

TEST(Normalization, ConstantWeightIsExactlyOne) {
  const auto z = normalize(WeightSpec::constant(3.0, 2), SpacetimePoint{{0.1, 0.2}, 0.0}, 0.7);
  EXPECT_EQ(z.scaled.omega({0.3, -0.2}), 1.0);
  EXPECT_EQ(z.omega_ref, 3.0);
}

TEST(RandomData, PositiveDeterministicAndBounded) {
  DataSpec spec;
  const auto a = draw_data(2, 5, spec), b = draw_data(2, 5, spec);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Point xi{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    EXPECT_GE(a(xi), spec.floor);
    EXPECT_EQ(a(xi), b(xi));
  }
  for (const auto& k : a.k)
    for (int v : k) EXPECT_LE(std::abs(v), spec.degree);
}

TEST(Harnack, ConstantSolutionHasRatioOne) {
  const auto run = normalized_run(WeightSpec::power(0.2, {0.0}, 1), SpacetimePoint{{0.25}, 0.0},
                                  1.0, CoefficientField::identity(1), constant_fn(1.0), {}, 16,
                                  Scheme::explicit_euler, 1.0);
  const auto m = harnack_member(run, 1);
  EXPECT_EQ(m.ratio, 1.0);
  EXPECT_TRUE(m.comparison_ok);
}

TEST(Harnack, DecayingSineMatchesClosedForm) {
  // u = e^{-t} sin x solves u_t = u_xx; on B_{2r}(pi/2) it is positive.
  const double r = 0.5, y = std::numbers::pi / 2, s = 0.3;
  auto u = [](const Point& x, double t) { return std::exp(-t) * std::sin(x[0]); };
  const SpacetimePoint Y{{y}, s};
  const auto z = normalize(WeightSpec::constant(1.0, 1), Y, 2 * r);
  const auto run = normalized_run_physical(
      WeightSpec::constant(1.0, 1), Y, 2 * r, CoefficientField::identity(1),
      [&](const Point& x) { return u(x, z.to_t(-1.0)); }, u, 64, Scheme::explicit_euler, 1.0);
  const auto m = harnack_member(run, 1);
  const double d = r * r;
  const double exact = std::exp(3 * d) / std::cos(r);
  EXPECT_NEAR(m.ratio / exact, 1.0, 0.02) << m.ratio << " vs " << exact;
}

TEST(Harnack, TimeRescalingIsExact) {
  auto a = small_spec(WeightSpec::constant(1.0, 1), 4);
  auto b = a;
  b.weight = WeightSpec::constant(3.0, 1);
  const auto ra = harnack_experiment(a), rb = harnack_experiment(b);
  ASSERT_EQ(ra.members.size(), rb.members.size());
  for (std::size_t i = 0; i < ra.members.size(); ++i) EXPECT_EQ(ra.members[i].ratio, rb.members[i].ratio);
}

TEST(Harnack, UnitWeightIsScaleFree) {
  auto spec = small_spec(WeightSpec::constant(1.0, 1), 4);
  spec.scales = {0.5, 1.0, 2.0};
  const auto rep = harnack_experiment(spec);
  EXPECT_EQ(rep.spread(), 1.0);
}

TEST(Harnack, RatioInvariantUnderScaling) {
  const auto data = draw_data(1, 9, DataSpec{});
  const auto w = WeightSpec::power(0.2, {0.0}, 1);
  const SpacetimePoint Y{{0.25}, 0.0};
  auto run_with = [&](double lambda) {
    return harnack_member(
        normalized_run(w, Y, 1.0, CoefficientField::identity(1),
                       [&](const Point& xi) { return lambda * data(xi); }, {}, 16,
                       Scheme::explicit_euler, 1.0),
        1);
  };
  const auto base = run_with(1.0);
  EXPECT_EQ(run_with(4.0).ratio, base.ratio);  // power-of-two scaling is exact
  EXPECT_NEAR(run_with(3.0).ratio, base.ratio, 1e-12 * base.ratio);
}

TEST(Harnack, WindowsAreDisjointAndOrdered) {
  const auto run = normalized_run(WeightSpec::power(0.2, {0.0}, 1), SpacetimePoint{{0.25}, 0.0},
                                  1.0, CoefficientField::identity(1), constant_fn(1.0), {}, 16,
                                  Scheme::explicit_euler, 1.0);
  const auto w = harnack_windows(run, 1);
  EXPECT_LT(w.u1_layers.second, w.u2_layers.first);
  EXPECT_LE(run.grid.time(w.u1_layers.second), -0.5);
  EXPECT_GT(run.grid.time(w.u1_layers.first), -0.75);
  EXPECT_GT(run.grid.time(w.u2_layers.first), -0.25);
  // Q = (-7/8, -3/4] sits strictly below U1.
  const auto q = run.layers(-0.875, -0.75);
  EXPECT_LT(q.second, w.u1_layers.first);
  EXPECT_LT(w.u2_space.size(), w.u1_space.size());
  for (auto i : w.u2_space) EXPECT_LE(norm(run.xi[i]), 0.5 - run.grid.dx(0) + 1e-15);
}

TEST(Harnack, EnsembleIsFiniteAndRespectsComparison) {
  auto spec = small_spec(WeightSpec::power(0.2, {0.0}, 1), 8);
  spec.Y = SpacetimePoint{{0.25}, 0.0};
  spec.coeff.kind = "checkerboard";
  spec.scales = {0.5, 1.0, 2.0};
  const auto rep = harnack_experiment(spec);
  EXPECT_TRUE(rep.all_finite());
  for (const auto& m : rep.members) EXPECT_TRUE(m.comparison_ok);
  for (const auto& s : rep.scales) {
    EXPECT_GT(s.min_ratio, 0.0);
    EXPECT_GT(s.u1_nodes, 0u);
  }
  EXPECT_LT(rep.spread(), 1.25);
  // Thread count does not change results.
  spec.threads = 3;
  EXPECT_EQ(harnack_members_csv(harnack_experiment(spec)), harnack_members_csv(rep));
}

TEST(Harnack, TwoDimensionalMember) {
  auto spec = small_spec(WeightSpec::power(0.3, {0.0, 0.0}, 2), 2);
  spec.Y = SpacetimePoint{{0.2, -0.1}, 0.0};
  spec.cells = 8;
  spec.coeff.kind = "checkerboard";
  const auto rep = harnack_experiment(spec);
  EXPECT_TRUE(rep.all_finite());
  for (const auto& m : rep.members) EXPECT_TRUE(m.comparison_ok);
}

TEST(Hoelder, OscillationDecays) {
  auto spec = small_spec(WeightSpec::power(0.2, {0.0}, 1), 4);
  spec.cells = 128;
  spec.coeff.kind = "checkerboard";
  const auto rep = hoelder_experiment(spec, 0.5);
  for (const auto& m : rep.members) {
    EXPECT_TRUE(m.nonincreasing);
    EXPECT_TRUE(m.alpha_ok()) << m.alpha;
    EXPECT_TRUE(m.fitted);
    EXPECT_GT(m.seminorm, 0.0);
  }
  spec.cells = 16;
  EXPECT_THROW(hoelder_experiment(spec, 0.5), ResolutionTooCoarse);
}

TEST(Liouville, UnitWeightContracts) {
  auto spec = small_spec(WeightSpec::constant(1.0, 1), 3);
  spec.cells = 48;
  LiouvilleOptions opt;
  opt.K = 1;
  const auto rep = liouville_experiment(spec, 1.0, opt);
  EXPECT_GE(rep.nodes_across_r, 8);
  for (const auto& m : rep.members) {
    EXPECT_LT(m.c, 1.0);
    for (std::size_t k = 1; k < m.phi.size(); ++k) EXPECT_GE(m.phi[k], m.phi[k - 1]);
  }
  spec.cells = 16;
  EXPECT_THROW(liouville_experiment(spec, 1.0, opt), ResolutionTooCoarse);
}

TEST(Growth, FirstLemmaShrinksSupremum) {
  auto spec = small_spec(WeightSpec::power(0.2, {0.0}, 1), 6);
  spec.cells = 24;
  const auto rep = growth1_experiment(spec, 1.0, {0.01, 0.05, 0.2});
  EXPECT_TRUE(rep.all_below_one());
  EXPECT_TRUE(rep.median_nondecreasing());
  for (const auto& r : rep.rows) EXPECT_LE(r.fraction, r.delta0);
  EXPECT_THROW(growth1_experiment(spec, 1.0, {1e-9}), ConstructionFailure);
}

TEST(Growth, ThirdLemmaKeepsPositiveFloor) {
  auto spec = small_spec(WeightSpec::power(0.2, {0.0}, 1), 6);
  spec.cells = 24;
  const std::vector<double> deltas{0.01, 0.05, 0.2};
  const auto rep = growth3_experiment(spec, 1.0, deltas);
  EXPECT_TRUE(rep.all_positive());
  EXPECT_TRUE(rep.nonincreasing());
  for (const auto& r : rep.rows) EXPECT_GE(r.fraction, 1 - r.delta);
}

TEST(PropUp, InfimaRatioGrowsAsBallShrinks) {
  auto spec = small_spec(WeightSpec::power(0.2, {0.0}, 1), 6);
  spec.cells = 24;
  const auto rep = propup_experiment(spec, 1.0, 0.5);
  EXPECT_TRUE(rep.pass());
  for (const auto& m : rep.members) {
    EXPECT_GE(m.q[1], m.q[0]);
    EXPECT_GE(m.q[2], m.q[1]);
  }
  EXPECT_LE(rep.tau, rep.sigma - 0.5 * make_cylinder(spec.weight, spec.Y, 1.0).depth);
  spec.data.trig = false;
  spec.data.bumps = 0;
  spec.data.floor = 0.0;
  EXPECT_THROW(propup_experiment(spec, 1.0, 0.5), DegenerateInfimum);
}

TEST(Csv, HeadersAndDigits) {
  const auto rep = harnack_experiment(small_spec(WeightSpec::constant(1.0, 1), 2));
  const auto csv = harnack_members_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scale,member,seed,sup_u1,inf_u2,ratio,finite,comparison_ok");
  const auto line = csv.substr(csv.find('\n') + 1);
  const auto field = line.substr(0, line.find(','));
  EXPECT_EQ(std::stod(field), 1.0);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
