#include <gtest/gtest.h>

#include <cmath>

#include "rellich/geometry.hpp"
#include "rellich/parse.hpp"
#include "rellich/tensor.hpp"

using namespace rellich;

namespace {

std::vector<Expr> identity_metric(int n) {
  std::vector<Expr> g(static_cast<std::size_t>(n * n), constant(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = constant(1.0);
  return g;
}

std::vector<Expr> conformal_metric(int n, const Expr& factor) {
  std::vector<Expr> g(static_cast<std::size_t>(n * n), constant(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = factor;
  return g;
}

Expr r_squared(int n) {
  Expr r2 = constant(0.0);
  for (int i = 0; i < n; ++i) r2 = add(r2, mul(coordinate(i), coordinate(i)));
  return r2;
}

/// 4 / (1 + |x|^2)^2: round unit sphere in stereographic coordinates.
Expr sphere_factor(int n) {
  return div(constant(4.0), pow_expr(add(constant(1.0), r_squared(n)), 2.0));
}

/// 4 / (1 - |x|^2)^2: hyperbolic space on the unit ball.
Expr hyperbolic_factor(int n) {
  return div(constant(4.0), pow_expr(sub(constant(1.0), r_squared(n)), 2.0));
}

ChartMetric euclidean(int n) {
  return ChartMetric(n, identity_metric(n), Validity::all(), "euclidean");
}

} // namespace

TEST(Christoffel, EuclideanVanishes) {
  ChartMetric g = euclidean(3);
  ExprEval ev;
  Point x{0.3, -1.2, 0.7};
  auto gamma = g.christoffel_at(x, ev);
  for (double v : gamma) EXPECT_EQ(v, 0.0);
}

TEST(Christoffel, ConformalClosedFormOracle) {
  // g = e^{2 phi} delta with phi = x1, n = 2. Independent closed form:
  // Gamma^k_{ij} = d^k_i phi_j + d^k_j phi_i - delta_ij delta^{ks} phi_s.
  const int n = 2;
  Expr phi = coordinate(0);
  Expr factor = exp_expr(mul(constant(2.0), phi));
  ChartMetric g(n, conformal_metric(n, factor), Validity::all(), "conformal");
  ExprEval ev;

  Point x{0.4, -0.3};
  auto gamma = g.christoffel_at(x, ev);
  auto at = [&](int k, int i, int j) { return gamma[static_cast<std::size_t>((k * n + i) * n + j)]; };

  std::vector<double> dphi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dphi[static_cast<std::size_t>(i)] = ev(differentiate(phi, i), x);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double expected = (k == i ? dphi[static_cast<std::size_t>(j)] : 0.0) +
                                (k == j ? dphi[static_cast<std::size_t>(i)] : 0.0) -
                                (i == j ? dphi[static_cast<std::size_t>(k)] : 0.0);
        EXPECT_NEAR(at(k, i, j), expected, 1e-13);
      }

  // spot values from the phi = x1 case
  EXPECT_NEAR(at(0, 0, 0), 1.0, 1e-13);
  EXPECT_NEAR(at(0, 1, 1), -1.0, 1e-13);
  EXPECT_NEAR(at(1, 0, 1), 1.0, 1e-13);
}

TEST(Christoffel, SphereChartVanishesAtOrigin) {
  ChartMetric g(2, conformal_metric(2, sphere_factor(2)), Validity::all(), "sphere2");
  ExprEval ev;
  Point x{0.0, 0.0};
  for (double v : g.christoffel_at(x, ev)) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Christoffel, SymmetricInLowerIndices) {
  ChartMetric g(3, conformal_metric(3, exp_expr(mul(constant(2.0), parse_expr("(x1 + x2*x3)/5", 3)))),
                Validity::all(), "confflat3");
  ExprEval ev;
  Lcg64 rng(5);
  for (int t = 0; t < 5; ++t) {
    Point x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          EXPECT_NEAR(ev(g.christoffel(k, i, j), x), ev(g.christoffel(k, j, i), x), 1e-13);
  }
}

TEST(Curvature, EuclideanFlat) {
  ChartMetric g = euclidean(3);
  ExprEval ev;
  Point x{1.0, 2.0, -0.5};
  CurvatureAtPoint c = g.curvature_at(x, ev);
  for (double v : c.riemann) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(c.scalar, 0.0);
}

TEST(Curvature, UnitSphereScalarIsNTimesNMinusOne) {
  const int n = 3;
  ChartMetric g(n, conformal_metric(n, sphere_factor(n)), Validity::all(), "sphere3");
  ExprEval ev;
  Lcg64 rng(42);
  for (int t = 0; t < 20; ++t) {
    Point x{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    CurvatureAtPoint c = g.curvature_at(x, ev);
    EXPECT_NEAR(c.scalar, static_cast<double>(n * (n - 1)), 1e-9) << "at trial " << t;
    EXPECT_GT(c.scalar, 0.0);
  }
}

TEST(Curvature, HyperbolicPlaneScalarIsMinusTwo) {
  const int n = 2;
  ChartMetric g(n, conformal_metric(n, hyperbolic_factor(n)),
                Validity::ball({0.0, 0.0}, 0.999), "hyperbolic2");
  ExprEval ev;
  Lcg64 rng(43);
  for (int t = 0; t < 20; ++t) {
    Point x = random_point_in_ball(rng, {0.0, 0.0}, 0.8);
    CurvatureAtPoint c = g.curvature_at(x, ev);
    EXPECT_NEAR(c.scalar, -2.0, 1e-9);
    EXPECT_LT(c.scalar, 0.0);
  }
}

TEST(Curvature, RiemannAntisymmetryExactAndBianchi) {
  const int n = 3;
  ChartMetric g(n, conformal_metric(n, sphere_factor(n)), Validity::all(), "sphere3");
  ExprEval ev;
  Lcg64 rng(7);
  Point x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  CurvatureAtPoint c = g.curvature_at(x, ev);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          EXPECT_EQ(c.riem(i, j, k, l), -c.riem(i, j, l, k)); // exact by construction
          EXPECT_NEAR(c.riem(i, j, k, l) + c.riem(i, k, l, j) + c.riem(i, l, j, k), 0.0, 1e-10);
        }
}

TEST(Curvature, RicciSymmetry) {
  const int n = 3;
  ChartMetric g(n, conformal_metric(n, exp_expr(mul(constant(2.0), parse_expr("(x1 + x2*x3)/5", n)))),
                Validity::all(), "confflat3");
  ExprEval ev;
  Lcg64 rng(11);
  for (int t = 0; t < 5; ++t) {
    Point x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CurvatureAtPoint c = g.curvature_at(x, ev);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) EXPECT_NEAR(c.ric(i, j), c.ric(j, i), 1e-10);
  }
}

// Commutation of covariant derivatives on a covector field realizes the
// Riemann tensor: (nabla_k nabla_l - nabla_l nabla_k) T_i + R^s_{ikl} T_s = 0.
TEST(Curvature, CommutationOnRandomCovector) {
  const int n = 3;
  ChartMetric g(n, conformal_metric(n, sphere_factor(n)), Validity::all(), "sphere3");
  std::vector<Expr> comps{parse_expr("x1^2 - x2*x3", n), parse_expr("sin(x1) + x3", n),
                          parse_expr("x2^2*x1", n)};
  TensorExpr T = TensorExpr::covector(&g, comps);
  TensorExpr DDT = T.cov_derivative().cov_derivative(); // slots (k, l, i)

  ExprEval ev;
  Lcg64 rng(13);
  for (int t = 0; t < 10; ++t) {
    Point x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i) {
          double r = ev(DDT.at({k, l, i}), x) - ev(DDT.at({l, k, i}), x);
          for (int s = 0; s < n; ++s)
            r += ev(g.riemann(s, i, k, l), x) * ev(comps[static_cast<std::size_t>(s)], x);
          EXPECT_NEAR(r, 0.0, 1e-9);
        }
  }
}

TEST(VolumeDensity, Cases) {
  ExprEval ev;
  ChartMetric e3 = euclidean(3);
  Point x{0.2, 0.4, -0.1};
  EXPECT_DOUBLE_EQ(e3.volume_density(x, ev), 1.0);

  // g = e^{2 phi} delta, n = 2, phi = 1 at the point: density e^2
  ChartMetric c2(2, conformal_metric(2, exp_expr(mul(constant(2.0), constant(1.0)))),
                 Validity::all(), "const-conformal");
  Point y{0.0, 0.0};
  EXPECT_NEAR(c2.volume_density(y, ev), std::exp(2.0), 1e-12);

  // sphere chart n = 2 at the origin: sqrt(det) = (e^{2 phi})^{n/2} = 4
  ChartMetric s2(2, conformal_metric(2, sphere_factor(2)), Validity::all(), "sphere2");
  EXPECT_NEAR(s2.volume_density(y, ev), 4.0, 1e-13);
}

TEST(Metric, ValidationRejectsAsymmetricAndSingular) {
  // asymmetric grid
  std::vector<Expr> bad{constant(1.0), constant(0.5), constant(0.0), constant(1.0)};
  EXPECT_THROW(ChartMetric(2, bad, Validity::all(), "bad"), PreconditionError);

  // signature failure: negative determinant
  std::vector<Expr> neg_det{constant(1.0), constant(0.0), constant(0.0), constant(-1.0)};
  EXPECT_THROW(ChartMetric(2, neg_det, Validity::all(), "lorentzian"), PreconditionError);
}

TEST(Metric, InverseContractsToIdentity) {
  const int n = 3;
  ChartMetric g(n, conformal_metric(n, sphere_factor(n)), Validity::all(), "sphere3");
  ExprEval ev;
  Lcg64 rng(17);
  for (int t = 0; t < 10; ++t) {
    Point x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += ev(g.ginv(i, k), x) * ev(g.g(k, j), x);
        EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-12);
      }
  }
}
