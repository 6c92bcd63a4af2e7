#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rellich/measure.hpp"
#include "rellich/presets.hpp"

using namespace rellich;
using namespace rellich::presets;

namespace {
constexpr double kPi = std::numbers::pi;

VolumeIntegrand one_v() {
  return [](std::span<const double>, ExprEval&) { return 1.0; };
}
BoundaryIntegrand one_b() {
  return [](const BoundaryPointData&, ExprEval&) { return 1.0; };
}
} // namespace

TEST(GaussLegendre, NodesAndWeights) {
  const GaussRule& r = gauss_legendre(5);
  double wsum = 0.0;
  for (double w : r.weights) wsum += w;
  EXPECT_NEAR(wsum, 2.0, 1e-14);
  EXPECT_NEAR(r.nodes[2], 0.0, 1e-15);
  // integrate x^8 over [-1,1]: exact with q = 5 (degree 9 rule)
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 8);
  EXPECT_NEAR(s, 2.0 / 9.0, 1e-14);
}

TEST(VolumeIntegral, UnitBoxMeasure) {
  auto g = euclidean(3);
  Domain d = unit_box(3);
  EXPECT_NEAR(integrate_volume(one_v(), d, *g, {8, 8}), 1.0, 1e-13);
}

TEST(VolumeIntegral, UnitBallVolume) {
  auto g = euclidean(3);
  Domain d = unit_ball(3);
  const double vol = integrate_volume(one_v(), d, *g, {16, 16});
  EXPECT_NEAR(vol / (4.0 * kPi / 3.0), 1.0, 1e-10);
}

TEST(VolumeIntegral, HemisphereAreaOnSphereChart) {
  // chart disk |x| <= 1 with the stereographic factor covers a hemisphere
  auto g = sphere_stereographic(2);
  Domain d = cap(2, 1.0);
  EXPECT_NEAR(integrate_volume(one_v(), d, *g, {16, 16}), 2.0 * kPi, 1e-8);
}

TEST(VolumeIntegral, GaussExactnessOnBoxes) {
  auto g = euclidean(2);
  Domain d = Domain::box({-1.0, 0.0}, {2.0, 1.5});
  // degree (2q-1) polynomial with q = 4: x1^7 x2^5
  Expr f = mul(pow_expr(coordinate(0), 7.0), pow_expr(coordinate(1), 5.0));
  const double got = integrate_volume(f, d, *g, {4, 4});
  const double exact = ((std::pow(2.0, 8) - std::pow(-1.0, 8)) / 8.0) * (std::pow(1.5, 6) / 6.0);
  EXPECT_NEAR(got / exact, 1.0, 1e-13);
}

TEST(VolumeIntegral, RefinementMonotonicity) {
  auto g = euclidean(2);
  Domain d = Domain::box({0.0, 0.0}, {1.0, 1.0});
  Expr f = exp_expr(mul(coordinate(0), cos_expr(mul(constant(3.0), coordinate(1)))));
  const double ref = integrate_volume(f, d, *g, {32, 8});
  const double e4 = std::fabs(integrate_volume(f, d, *g, {4, 8}) - ref);
  const double e8 = std::fabs(integrate_volume(f, d, *g, {8, 8}) - ref);
  EXPECT_GE(e4, 10.0 * e8);
}

TEST(BoundaryIntegral, UnitBoxSurface) {
  auto g = euclidean(3);
  Domain d = unit_box(3);
  EXPECT_NEAR(integrate_boundary(one_b(), d, *g, {8, 8}), 6.0, 1e-12);
}

TEST(BoundaryIntegral, UnitSphereArea) {
  auto g = euclidean(3);
  Domain d = unit_ball(3);
  EXPECT_NEAR(integrate_boundary(one_b(), d, *g, {16, 24}) / (4.0 * kPi), 1.0, 1e-10);
}

TEST(BoundaryIntegral, RadialFluxEqualsArea) {
  // (h, nu) = |x| = 1 on the unit sphere; also equals n * vol by divergence
  auto g = euclidean(3);
  Domain d = unit_ball(3);
  VectorField h = dilation(g);
  const double flux = integrate_boundary(
      [&h](const BoundaryPointData& bp, ExprEval& ev) {
        double s = 0.0;
        for (std::size_t i = 0; i < bp.nu.size(); ++i) s += ev(h.comps[i], bp.x) * bp.nu[i];
        return s;
      },
      d, *g, {16, 24});
  EXPECT_NEAR(flux / (4.0 * kPi), 1.0, 1e-10);
  const double vol = integrate_volume(one_v(), d, *g, {16, 24});
  EXPECT_NEAR(flux, 3.0 * vol, 1e-9);
}

TEST(OutwardNormal, FlatBallAndBoxFace) {
  auto g = euclidean(3);
  ExprEval ev;
  Domain b = unit_ball(3);
  auto nu = outward_normal(b, *g, Point{1.0, 0.0, 0.0}, ev);
  EXPECT_NEAR(nu[0], 1.0, 1e-14);
  EXPECT_NEAR(nu[1], 0.0, 1e-14);
  EXPECT_NEAR(nu[2], 0.0, 1e-14);

  Domain box = unit_box(3);
  auto nub = outward_normal(box, *g, Point{1.0, 0.4, 0.6}, ev);
  EXPECT_DOUBLE_EQ(nub[0], 1.0);
  auto nul = outward_normal(box, *g, Point{0.0, 0.4, 0.6}, ev);
  EXPECT_DOUBLE_EQ(nul[0], -1.0);
}

TEST(OutwardNormal, ConformalBallCarriesFactor) {
  // nu_i = e^{phi} x_i / |x| on the ball boundary of g = e^{2 phi} delta
  Expr phi = parse_expr("(x1 - x2/2)/3", 3);
  auto g = conformally_flat(3, phi);
  Domain b = unit_ball(3);
  ExprEval ev;
  Lcg64 rng(9);
  for (int t = 0; t < 10; ++t) {
    Point x = random_point_on_sphere(rng, {0.0, 0.0, 0.0}, 1.0);
    auto nu = outward_normal(b, *g, x, ev);
    const double factor = std::exp(evaluate(phi, x));
    double unit = 0.0;
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(nu[static_cast<std::size_t>(i)], factor * x[static_cast<std::size_t>(i)], 1e-10);
      for (int j = 0; j < 3; ++j)
        unit += ev(g->ginv(i, j), x) * nu[static_cast<std::size_t>(i)] * nu[static_cast<std::size_t>(j)];
    }
    EXPECT_NEAR(unit, 1.0, 1e-10);
  }
}

TEST(DivergenceTheorem, FlatBallClosedForm) {
  auto g = euclidean(3);
  Domain d = unit_ball(3);
  EXPECT_LE(divergence_theorem_residual(dilation(g), d, *g, {16, 24}), 1e-9);
}

TEST(DivergenceTheorem, ZeroField) {
  auto g = sphere_stereographic(2);
  VectorField zero{g, {constant(0.0), constant(0.0)}, "zero"};
  EXPECT_EQ(divergence_theorem_residual(zero, cap(2, 1.0), *g, {8, 8}), 0.0);
}

TEST(DivergenceTheorem, SphereChartGradientField) {
  auto g = sphere_stereographic(2);
  ScalarField u{g, coordinate(0), "x1"};
  TensorExpr grad = gradient_con(*g, u.u);
  VectorField w{g, {grad.at({0}), grad.at({1})}, "grad x1"};
  EXPECT_LE(divergence_theorem_residual(w, cap(2, 1.0), *g, {16, 24}), 1e-8);
}

TEST(DivergenceTheorem, RandomFieldsOnPresetPairs) {
  struct Pair {
    MetricPtr g;
    Domain d;
  };
  std::vector<Pair> pairs;
  pairs.push_back({euclidean(3), unit_box(3)});
  pairs.push_back({euclidean(3), unit_ball(3)});
  pairs.push_back({sphere_stereographic(3), cap(3, 1.0)});
  pairs.push_back({conformally_flat(3, parse_expr("(x1+x2*x3)/5", 3)), unit_box(3)});
  pairs.push_back({hyperbolic_ball(2), cap(2, 0.7)});

  Lcg64 rng(2024);
  for (const auto& [g, d] : pairs) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<Expr> comps;
      for (int i = 0; i < g->dim(); ++i) comps.push_back(random_polynomial(g->dim(), 2, rng));
      VectorField w{g, std::move(comps), "random"};
      EXPECT_LE(divergence_theorem_residual(w, d, *g, {16, 24}), 1e-8)
          << g->label() << " trial " << trial;
    }
  }
}

TEST(Domain, InvariantsAndErrors) {
  EXPECT_THROW(Domain::box({0.0, 1.0}, {1.0, 0.5}), PreconditionError);
  EXPECT_THROW(Domain::ball({0.0, 0.0}, -1.0), PreconditionError);

  // level-set parametrization satisfies phi(P(t)) = 0
  Domain b = Domain::ball({0.5, -0.25}, 1.25);
  ExprEval ev;
  Lcg64 rng(33);
  const auto& patch = b.boundary_patches()[0];
  for (int t = 0; t < 20; ++t) {
    Point params{rng.uniform(patch.lo[0], patch.hi[0])};
    Point x{ev(patch.map[0], params), ev(patch.map[1], params)};
    EXPECT_LE(std::fabs(ev(b.level_set(), x)), 1e-10);
  }
}

TEST(Domain, QuadratureNodesRespectValidity) {
  auto g = hyperbolic_ball(2);
  // cap touching the chart boundary: nodes would leave the validity ball
  EXPECT_THROW(make_volume_rule(cap(2, 1.05), *g, {8, 8}), PreconditionError);
}

TEST(PairwiseSum, MatchesSimpleSumOnSmallInput) {
  std::vector<double> v{1.0, 2.0, 3.0, 4.5, -2.25};
  EXPECT_DOUBLE_EQ(pairwise_sum(v), 8.25);
}
