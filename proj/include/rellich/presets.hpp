#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rellich/diffops.hpp"
#include "rellich/measure.hpp"
#include "rellich/parse.hpp"

namespace rellich {
namespace presets {

inline Expr r_squared(int n) {
  Expr r2 = constant(0.0);
  for (int i = 0; i < n; ++i) r2 = add(r2, mul(coordinate(i), coordinate(i)));
  return r2;
}

// --- metrics ---------------------------------------------------------------

inline MetricPtr euclidean(int n) {
  std::vector<Expr> g(static_cast<std::size_t>(n * n), constant(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = constant(1.0);
  return std::make_shared<ChartMetric>(n, std::move(g), Validity::all(), "euclidean");
}

/// g = e^{2 phi} delta.
inline MetricPtr conformally_flat(int n, const Expr& phi,
                                  Validity validity = Validity::all(),
                                  const std::string& label = "conformally_flat") {
  const Expr factor = exp_expr(mul(constant(2.0), phi));
  std::vector<Expr> g(static_cast<std::size_t>(n * n), constant(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = factor;
  return std::make_shared<ChartMetric>(n, std::move(g), std::move(validity), label);
}

/// Round unit sphere in stereographic coordinates: g = 4/(1+|x|^2)^2 delta,
/// scalar curvature n(n-1).
inline MetricPtr sphere_stereographic(int n) {
  const Expr factor = div(constant(4.0), pow_expr(add(constant(1.0), r_squared(n)), 2.0));
  std::vector<Expr> g(static_cast<std::size_t>(n * n), constant(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = factor;
  return std::make_shared<ChartMetric>(n, std::move(g), Validity::all(), "sphere_stereographic");
}

/// Hyperbolic space on the unit ball: g = 4/(1-|x|^2)^2 delta, scalar
/// curvature -n(n-1). Valid only for |x| < 1.
inline MetricPtr hyperbolic_ball(int n) {
  const Expr factor = div(constant(4.0), pow_expr(sub(constant(1.0), r_squared(n)), 2.0));
  std::vector<Expr> g(static_cast<std::size_t>(n * n), constant(0.0));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i * n + i)] = factor;
  return std::make_shared<ChartMetric>(n, std::move(g),
                                       Validity::ball(Point(static_cast<std::size_t>(n), 0.0), 0.999),
                                       "hyperbolic_ball");
}

// --- vector fields ----------------------------------------------------------

/// Dilation x^i d_i: homothety with div(h) = n on flat space.
inline VectorField dilation(MetricPtr g) {
  std::vector<Expr> comps;
  for (int i = 0; i < g->dim(); ++i) comps.push_back(coordinate(i));
  return VectorField{std::move(g), std::move(comps), "dilation"};
}

/// Translation d_k (1-based axis).
inline VectorField translation(MetricPtr g, int axis) {
  if (axis < 1 || axis > g->dim()) throw PreconditionError("translation: axis out of range");
  std::vector<Expr> comps(static_cast<std::size_t>(g->dim()), constant(0.0));
  comps[static_cast<std::size_t>(axis - 1)] = constant(1.0);
  return VectorField{std::move(g), std::move(comps), "translation"};
}

/// Rotation (-x2, x1, 0, ...): isometric Killing field of flat space.
inline VectorField rotation(MetricPtr g) {
  if (g->dim() < 2) throw PreconditionError("rotation: needs dimension >= 2");
  std::vector<Expr> comps(static_cast<std::size_t>(g->dim()), constant(0.0));
  comps[0] = neg(coordinate(1));
  comps[1] = coordinate(0);
  return VectorField{std::move(g), std::move(comps), "rotation"};
}

/// Special conformal field h^i = 2 x^i (b.x) - b^i |x|^2 with b = e_axis
/// (1-based). Conformal Killing on every conformally flat chart; on flat
/// space mu = 4 (b.x).
inline VectorField special_conformal(MetricPtr g, int axis) {
  const int n = g->dim();
  if (axis < 1 || axis > n) throw PreconditionError("special_conformal: axis out of range");
  const Expr bx = coordinate(axis - 1);
  const Expr r2 = r_squared(n);
  std::vector<Expr> comps;
  for (int i = 0; i < n; ++i) {
    Expr c = mul(constant(2.0), mul(coordinate(i), bx));
    if (i == axis - 1) c = sub(c, r2);
    comps.push_back(c);
  }
  return VectorField{std::move(g), std::move(comps), "special_conformal"};
}

/// First-order harmonic of the round sphere pulled to the stereographic
/// chart: Y_k = 2 x^k / (1 + |x|^2), an eigenfunction with Delta Y = -n Y.
inline Expr sphere_harmonic(int n, int k) {
  if (k < 1 || k > n) throw PreconditionError("sphere_harmonic: axis out of range");
  return div(mul(constant(2.0), coordinate(k - 1)), add(constant(1.0), r_squared(n)));
}

/// Conformal (non-isometric, non-homothetic) Killing field of the round
/// sphere: the raised gradient of the k-th coordinate harmonic. Its
/// conformal factor is computed, never declared; closed form of the
/// components: h^i = (1+|x|^2)/2 d_ik - x^i x^k.
inline VectorField sphere_conformal(MetricPtr g, int k) {
  const int n = g->dim();
  const Expr y = sphere_harmonic(n, k);
  std::vector<Expr> comps;
  for (int i = 0; i < n; ++i) {
    Expr c = constant(0.0);
    for (int j = 0; j < n; ++j) c = add(c, mul(g->ginv(i, j), differentiate(y, j)));
    comps.push_back(c);
  }
  return VectorField{std::move(g), std::move(comps), "sphere_conformal"};
}

// --- scalar fields ----------------------------------------------------------

inline Expr prod_sin(int n) {
  Expr p = constant(1.0);
  for (int i = 0; i < n; ++i)
    p = mul(p, sin_expr(mul(constant(3.14159265358979323846), coordinate(i))));
  return p;
}

/// (1 - |x|^2)^p: polynomial bump vanishing on the unit sphere.
inline Expr bump(int n, int p) {
  if (p < 1) throw PreconditionError("bump: exponent must be >= 1");
  return pow_expr(sub(constant(1.0), r_squared(n)), static_cast<double>(p));
}

inline Expr monomial(const std::vector<int>& alpha) {
  Expr m = constant(1.0);
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (int rep = 0; rep < alpha[i]; ++rep) m = mul(m, coordinate(static_cast<int>(i)));
  return m;
}

/// Random polynomial of total degree <= deg with coefficients in [-1, 1];
/// deterministic for a fixed seed.
inline Expr random_polynomial(int n, int deg, Lcg64& rng) {
  Expr p = constant(0.0);
  std::vector<int> alpha(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      alpha[static_cast<std::size_t>(pos)] = remaining;
      p = add(p, mul(constant(rng.uniform(-1.0, 1.0)), monomial(alpha)));
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      alpha[static_cast<std::size_t>(pos)] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  for (int total = 0; total <= deg; ++total) rec(rec, 0, total);
  return p;
}

// --- domains ----------------------------------------------------------------

inline Domain unit_box(int n) {
  return Domain::box(Point(static_cast<std::size_t>(n), 0.0), Point(static_cast<std::size_t>(n), 1.0));
}

inline Domain unit_ball(int n) {
  return Domain::ball(Point(static_cast<std::size_t>(n), 0.0), 1.0);
}

/// Chart cap |x| <= r.
inline Domain cap(int n, double r) {
  return Domain::ball(Point(static_cast<std::size_t>(n), 0.0), r);
}

// --- catalog ----------------------------------------------------------------

/// Verify a preset field's declared diagnostics on its canonical metric.
/// Throws if the declaration does not match the computed values.
inline void verify_field_declaration(const VectorField& h, bool conformal, bool homothety,
                                     double declared_mu_if_constant) {
  Lcg64 rng(271828);
  std::vector<Point> samples;
  for (int k = 0; k < 12; ++k)
    samples.push_back(h.metric->validity().sample(rng, h.metric->dim()));
  KillingDiagnostics d = killing_diagnostics(h, samples);
  if (conformal && d.deviation > 1e-9)
    throw PreconditionError("preset " + h.label + ": declared conformal but deviation " +
                            std::to_string(d.deviation));
  if (homothety) {
    if (d.mu_max - d.mu_min > 1e-9 || std::fabs(d.mu - declared_mu_if_constant) > 1e-9)
      throw PreconditionError("preset " + h.label + ": declared homothety mismatch");
  } else if (conformal && d.mu_max - d.mu_min < 1e-9) {
    throw PreconditionError("preset " + h.label + ": declared non-constant mu but mu is constant");
  }
}

/// Deterministic catalog listing (byte-identical across runs).
inline std::string list_presets() {
  std::ostringstream os;
  os << "metrics:\n"
     << "  euclidean(n)                 flat space, R = 0\n"
     << "  conformally_flat(n, phi)     g = e^{2 phi} delta\n"
     << "  sphere_stereographic(n)      round unit sphere chart, R = n(n-1)\n"
     << "  hyperbolic_ball(n)           hyperbolic chart on |x| < 1, R = -n(n-1)\n"
     << "vector fields:\n"
     << "  dilation                     homothety, mu=2, div h = n (flat)\n"
     << "  translation(k)               isometry, mu=0 (flat)\n"
     << "  rotation                     isometry, mu=0 (flat)\n"
     << "  special_conformal(k)         conformal, mu non-constant, mu = 4 x_k (flat)\n"
     << "  sphere_conformal(k)          conformal, mu non-constant first harmonic (sphere)\n"
     << "scalar fields:\n"
     << "  prod_sin                     product of sin(pi x_i), Navier data on the unit box\n"
     << "  bump(p)                      (1 - |x|^2)^p\n"
     << "domains:\n"
     << "  unit_box                     [0,1]^n\n"
     << "  unit_ball                    |x| <= 1\n"
     << "  cap(r)                       chart cap |x| <= r\n";
  return os.str();
}

} // namespace presets
} // namespace rellich
