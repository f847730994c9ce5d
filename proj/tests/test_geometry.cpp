#include <gtest/gtest.h>

#include "hlab/geometry.hpp"

using namespace hlab;

namespace {

const WeightSpec kOne = WeightSpec::constant(1.0, 1);
const WeightSpec kHalf = WeightSpec::power(0.5, {0.0}, 1);

SpacetimePoint st(double x, double t) { return {{x}, t}; }

}  // namespace

TEST(Geometry, CylinderDepths) {
  EXPECT_EQ(make_cylinder(kOne, st(0, 0), 1.0).depth, 1.0);
  EXPECT_NEAR(make_cylinder(kHalf, st(0, 0), 1.0).depth, 2.0, 1e-14);
  EXPECT_EQ(make_cylinder(kOne, st(0, 0), 1.0, 0.5).depth, 0.5);
  EXPECT_THROW(make_cylinder(kOne, st(0, 0), 0.0), NumericalError);
  EXPECT_THROW(make_cylinder(kOne, st(0, 0), 1.0, 1.5), NumericalError);
}

TEST(Geometry, DepthEquivalentForm) {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto w = WeightSpec::power(rng.uniform(-0.9, 0.9), {0.0}, 1);
    const auto c = make_cylinder(w, st(rng.uniform(-2, 2), 0.0), rng.log_uniform(0.01, 3));
    const double muB = weighted_measure(w, Field::mu, c.ball());
    EXPECT_NEAR(c.depth, 0.5 * c.r * muB, 1e-12 * c.depth);
  }
}

TEST(Geometry, CylinderMeasure) {
  EXPECT_NEAR(cylinder_mu_measure(make_cylinder(kOne, st(0, 0), 1.0)), 2.0, 1e-15);
  const auto one2 = WeightSpec::constant(1.0, 2);
  EXPECT_NEAR(cylinder_mu_measure(make_cylinder(one2, {{0, 0}, 0}, 1.0)),
              std::numbers::pi, 1e-13);  // area pi times depth 1
  EXPECT_NEAR(cylinder_mu_measure(make_cylinder(kHalf, st(0, 0), 1.0)), 8.0, 1e-13);
  EXPECT_NEAR(weighted_measure(kOne, Field::mu, make_cylinder(kOne, st(0, 0), 1.0)), 2.0,
              1e-15);
}

TEST(Geometry, CylinderMeasureDirect) {
  Rng rng(8);
  for (int i = 0; i < 12; ++i) {
    const int n = 1 + i % 2;
    const auto w = WeightSpec::power(rng.uniform(-0.5, 0.5), Point(n, 0.0), n);
    Point y(n);
    for (auto& v : y) v = rng.uniform(-1, 1);
    const auto c = make_cylinder(w, {y, rng.uniform(-1, 1)}, rng.log_uniform(0.1, 2));
    const double a = cylinder_mu_measure(c), b = cylinder_mu_measure_direct(c);
    EXPECT_NEAR(a, b, 1e-6 * a);
  }
}

TEST(Geometry, Phi) {
  EXPECT_DOUBLE_EQ(phi(kOne, {3.0}, 0.5), 0.25);
  EXPECT_NEAR(phi_inverse(kOne, {3.0}, 0.25), 0.5, 1e-10);
  EXPECT_NEAR(phi(kHalf, {0.0}, 1.0), 2.0, 1e-14);
  EXPECT_NEAR(phi_inverse(kHalf, {0.0}, 2.0), 1.0, 1e-9);
  EXPECT_EQ(phi(kHalf, {0.0}, 0.0), 0.0);
  // Closed form ((1 - beta) h)^{1/(2 - beta)} for the centered power weight.
  for (double h : {1e-6, 0.3, 7.0, 1e4}) {
    const double tau = phi_inverse(kHalf, {0.0}, h);
    EXPECT_NEAR(tau, std::pow(0.5 * h, 1 / 1.5), 1e-9 * tau);
    EXPECT_GE(phi(kHalf, {0.0}, tau), h);
    EXPECT_NEAR(phi(kHalf, {0.0}, tau), h, 2e-9 * h);
  }
  const auto w = WeightSpec::power(-0.3, {0.0}, 1);
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double v = phi(w, {0.4}, 0.01 * i);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Geometry, ThetaAndRho) {
  EXPECT_NEAR(theta(st(0, 0), st(0, 1), kOne), 1.0, 1e-10);
  EXPECT_EQ(theta(st(2, 0), st(0, 1), kOne), 2.0);
  EXPECT_NEAR(theta(st(0, 0), st(0, 2), kHalf), 1.0, 1e-9);
  EXPECT_THROW(theta(st(0, 2), st(0, 1), kOne), NumericalError);
  EXPECT_NEAR(quasi_distance(st(0, 0), st(0, 1), kOne), 1.0, 1e-10);
  EXPECT_NEAR(quasi_distance(st(1, 0), st(0, 1), kOne), std::sqrt(2.0), 1e-10);
  EXPECT_EQ(quasi_distance(st(0.3, 0.1), st(0.3, 0.1), kHalf), 0.0);
  // Time order swaps the centering point.
  EXPECT_EQ(quasi_distance(st(1, 0), st(0, 1), kHalf), quasi_distance(st(0, 1), st(1, 0), kHalf));
}

TEST(Geometry, SandwichAndQuasiTriangle) {
  Rng rng(21);
  for (const auto& w : {kOne, WeightSpec::power(0.3, {0.0}, 1),
                        WeightSpec::power(-0.3, {0.0}, 1)}) {
    for (int i = 0; i < 2000; ++i) {
      auto pt = [&] { return st(rng.uniform(-2, 2), rng.uniform(-2, 2)); };
      const auto X = pt(), Y = pt(), Z = pt();
      const auto& lo = X.t <= Y.t ? X : Y;
      const auto& hi = X.t <= Y.t ? Y : X;
      const double th = theta(lo, hi, w);
      const double rho = quasi_distance(X, Y, w);
      EXPECT_GE(rho, th);
      EXPECT_LE(rho, std::sqrt(2.0) * th * (1 + 1e-12));
      EXPECT_LE(quasi_distance(X, Z, w),
                2 * (rho + quasi_distance(Y, Z, w)) * (1 + 1e-12));
    }
  }
}

TEST(Geometry, ScaleCoherence) {
  // omega = lambda versus omega = 1 with times scaled by lambda.
  for (double lambda : {2.0, 0.25}) {
    const auto wl = WeightSpec::constant(lambda, 1);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(-1, 1), t = rng.uniform(-1, 1);
      const double y = rng.uniform(-1, 1), s = rng.uniform(-1, 1);
      EXPECT_EQ(quasi_distance(st(x, t), st(y, s), wl),
                quasi_distance(st(x, lambda * t), st(y, lambda * s), kOne));
    }
    EXPECT_EQ(make_cylinder(wl, st(0, 0), 0.75).depth, 0.75 * 0.75 / lambda);
  }
  for (double lambda : {3.0, 0.3}) {
    const auto w = WeightSpec::power(0.4, {0.0}, 1);
    const auto wl = WeightSpec::product({WeightSpec::constant(lambda, 1), w});
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(-1, 1), t = rng.uniform(-1, 1);
      const double y = rng.uniform(-1, 1), s = rng.uniform(-1, 1);
      const double a = quasi_distance(st(x, t), st(y, s), wl);
      const double b = quasi_distance(st(x, lambda * t), st(y, lambda * s), w);
      EXPECT_NEAR(a, b, 1e-8 * b);
    }
  }
}

TEST(Geometry, BoundaryClassification) {
  const auto c = make_cylinder(kOne, st(0, 0), 1.0);
  EXPECT_EQ(boundary_classify(c, st(0, -1)), BoundaryClass::bottom);
  EXPECT_EQ(boundary_classify(c, st(1, -0.5)), BoundaryClass::lateral);
  EXPECT_EQ(boundary_classify(c, st(0, 0)), BoundaryClass::top);
  EXPECT_EQ(boundary_classify(c, st(0.5, -0.5)), BoundaryClass::interior);
  EXPECT_EQ(boundary_classify(c, st(1.5, -0.5)), BoundaryClass::outside);
  EXPECT_EQ(boundary_classify(c, st(0, 0.1)), BoundaryClass::outside);
  EXPECT_EQ(boundary_classify(c, st(1, -1)), BoundaryClass::bottom);
}

TEST(Geometry, Inclusion) {
  EXPECT_TRUE(inclusion_check(kOne, st(0, 0), 1.0, 0.5, st(0.25, -0.2)));
  for (double th : {0.1, 0.5, 0.9}) EXPECT_TRUE(inclusion_check(kHalf, st(0.3, 1), 1.0, th, st(0.3, 1)));
  EXPECT_FALSE(inclusion_check(kOne, st(0, 0), 1.0, 0.5, st(0.9, -0.2)));
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double th = rng.uniform(0.01, 0.99);
    const SpacetimePoint Y = st(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double r = rng.log_uniform(0.1, 3);
    const auto inner = make_cylinder(kHalf, Y, (1 - th) * r);
    const SpacetimePoint X0 =
        st(Y.x[0] + (1 - th) * r * rng.uniform(-1, 1) * 0.999999,
           Y.t - inner.depth * rng.uniform(1e-9, 1 - 1e-9));
    ASSERT_TRUE(inner.contains(X0));
    EXPECT_TRUE(inclusion_check(kHalf, Y, r, th, X0));
  }
}

TEST(Geometry, HatAndU) {
  const auto c = make_cylinder(kOne, st(0, 0), 1.0);
  const auto hat = hat_cylinder(c, 3.0);
  EXPECT_EQ(hat.t_lo, 1.0);
  EXPECT_EQ(hat.t_hi, 3.0);
  EXPECT_EQ(hat.radius, 1.0);
  const auto U = u_cylinder(c, 3.0);
  EXPECT_EQ(U.radius, 2.0);
  EXPECT_EQ(U.t_lo, 0.0);
  EXPECT_EQ(U.t_hi, 3.0);
  EXPECT_TRUE(U.contains(hat));
  const auto h2 = hat_cylinder(make_cylinder(kHalf, st(0, 0), 1.0), 2.0);
  EXPECT_NEAR(h2.t_lo, 2.0, 1e-14);
  EXPECT_NEAR(h2.t_hi, 4.0, 1e-14);
}

TEST(Geometry, Slant) {
  const SlantCylinder straight(st(0, 2), 1.0);
  EXPECT_TRUE(slant_contains(straight, st(0, 1)));
  EXPECT_FALSE(slant_contains(straight, st(0, 0)));
  EXPECT_EQ(straight.classify(st(0.5, 0)), BoundaryClass::bottom);
  const SlantCylinder V(st(1, 1), 0.5);
  EXPECT_TRUE(slant_contains(V, st(0.5, 0.5)));
  EXPECT_FALSE(slant_contains(V, st(0.0, 0.9)));
  EXPECT_EQ(V.classify(st(1.0, 0.5)), BoundaryClass::lateral);
  EXPECT_THROW(SlantCylinder(st(0, 0), 1.0), NumericalError);
}
