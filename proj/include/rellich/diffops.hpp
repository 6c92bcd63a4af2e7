#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rellich/tensor.hpp"

namespace rellich {

struct ScalarField {
  MetricPtr metric;
  Expr u;
  std::string label;
};

struct VectorField {
  MetricPtr metric;
  std::vector<Expr> comps; // contravariant h^i
  std::string label;
};

// ---------------------------------------------------------------------------
// Expression-level operators. These are built once per field and evaluated
// many times; all higher identities are assembled from them.

/// u_i = d_i u as a covector.
inline TensorExpr gradient_cov(const ChartMetric& g, const Expr& u) {
  return TensorExpr::scalar(&g, u).cov_derivative();
}

/// u^i = g^{is} u_s.
inline TensorExpr gradient_con(const ChartMetric& g, const Expr& u) {
  return gradient_cov(g, u).raise(0);
}

/// nabla_i nabla_j u (symmetric).
inline TensorExpr hessian_expr(const ChartMetric& g, const Expr& u) {
  return TensorExpr::scalar(&g, u).cov_derivative().cov_derivative();
}

/// Laplace-Beltrami as the metric trace of the covariant Hessian.
inline Expr laplacian_expr(const ChartMetric& g, const Expr& u) {
  return hessian_expr(g, u).raise(0).contract(0, 1).value();
}

/// Same operator in divergence form, (1/sqrt(det g)) d_i (sqrt(det g) g^{ij} d_j u).
/// Kept as an independent route for cross-checking.
inline Expr laplacian_density_expr(const ChartMetric& g, const Expr& u) {
  const int n = g.dim();
  Expr sum = constant(0.0);
  for (int i = 0; i < n; ++i) {
    Expr flux = constant(0.0);
    for (int j = 0; j < n; ++j) flux = add(flux, mul(g.ginv(i, j), differentiate(u, j)));
    sum = add(sum, differentiate(mul(g.sqrt_det(), flux), i));
  }
  return div(sum, g.sqrt_det());
}

/// The ladder Delta^0 u, Delta^1 u, ..., Delta^k u. Each iterate is guarded
/// by a node-count cap so runaway expression growth fails loudly.
inline std::vector<Expr> laplacian_ladder(const ChartMetric& g, const Expr& u, int k,
                                          std::size_t node_cap = 2'000'000) {
  std::vector<Expr> ladder;
  ladder.reserve(static_cast<std::size_t>(k) + 1);
  ladder.push_back(u);
  for (int s = 1; s <= k; ++s) {
    Expr next = laplacian_expr(g, ladder.back());
    if (node_count(next) > node_cap)
      throw ResourceError("polyharmonic iterate " + std::to_string(s) +
                          " exceeds node cap of " + std::to_string(node_cap));
    ladder.push_back(std::move(next));
  }
  return ladder;
}

inline Expr polyharmonic_expr(const ChartMetric& g, const Expr& u, int k,
                              std::size_t node_cap = 2'000'000) {
  if (k < 1) throw PreconditionError("polyharmonic: power must be >= 1");
  return laplacian_ladder(g, u, k, node_cap).back();
}

/// div h = nabla_i h^i.
inline Expr divergence_expr(const ChartMetric& g, const std::vector<Expr>& h) {
  return TensorExpr::vector_up(&g, h).cov_derivative().contract(0, 1).value();
}

/// Conformal factor mu = (2/n) div h.
inline Expr mu_expr(const ChartMetric& g, const std::vector<Expr>& h) {
  return mul(constant(2.0 / g.dim()), divergence_expr(g, h));
}

/// L_h g_ij = nabla_i h_j + nabla_j h_i.
inline TensorExpr lie_metric_expr(const ChartMetric& g, const std::vector<Expr>& h) {
  TensorExpr grad = TensorExpr::vector_up(&g, h).lower(1).cov_derivative(); // (i, j) -> nabla_i h_j
  return grad + grad.permute({1, 0});
}

/// nabla^i h^k with both indices up, slot order (i, k).
inline TensorExpr grad_h_upup(const ChartMetric& g, const std::vector<Expr>& h) {
  return TensorExpr::vector_up(&g, h).cov_derivative().raise(0);
}

/// S^{ij} = nabla^i h^j + nabla^j h^i - mu g^{ij}; identically zero exactly
/// when h is conformal Killing.
inline TensorExpr conformal_deviation_expr(const ChartMetric& g, const std::vector<Expr>& h) {
  const int n = g.dim();
  TensorExpr grad = grad_h_upup(g, h);
  TensorExpr sym = grad + grad.permute({1, 0});
  const Expr mu = mu_expr(g, h);
  std::vector<Expr> mg(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mg[static_cast<std::size_t>(i * n + j)] = mul(mu, g.ginv(i, j));
  return sym - TensorExpr(&g, {Slot::Up, Slot::Up}, std::move(mg));
}

/// Scalar Lie derivative L_h f = h^k d_k f.
inline Expr lie_scalar_expr(const ChartMetric& g, const std::vector<Expr>& h, const Expr& f) {
  Expr sum = constant(0.0);
  for (int k = 0; k < g.dim(); ++k) sum = add(sum, mul(h[static_cast<std::size_t>(k)], differentiate(f, k)));
  return sum;
}

// ---------------------------------------------------------------------------
// Pointwise operations (spec surface). Each builds the expression once per
// call; hot loops should use the expression-level functions above.

struct GradientAtPoint {
  std::vector<double> cov; // u_i
  std::vector<double> con; // u^i
};

inline GradientAtPoint covariant_gradient(const ScalarField& u, std::span<const double> x) {
  const ChartMetric& g = *u.metric;
  ExprEval ev;
  GradientAtPoint out;
  TensorExpr dc = gradient_cov(g, u.u);
  TensorExpr du = gradient_con(g, u.u);
  for (int i = 0; i < g.dim(); ++i) {
    out.cov.push_back(ev(dc.at({i}), x));
    out.con.push_back(ev(du.at({i}), x));
  }
  return out;
}

inline std::vector<double> covariant_hessian(const ScalarField& u, std::span<const double> x) {
  const ChartMetric& g = *u.metric;
  ExprEval ev;
  TensorExpr hess = hessian_expr(g, u.u);
  std::vector<double> out;
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) out.push_back(ev(hess.at({i, j}), x));
  return out;
}

inline double laplace_beltrami(const ScalarField& u, std::span<const double> x) {
  ExprEval ev;
  return ev(laplacian_expr(*u.metric, u.u), x);
}

inline double laplace_beltrami_density(const ScalarField& u, std::span<const double> x) {
  ExprEval ev;
  return ev(laplacian_density_expr(*u.metric, u.u), x);
}

inline double polyharmonic(const ScalarField& u, std::span<const double> x, int k) {
  ExprEval ev;
  return ev(polyharmonic_expr(*u.metric, u.u, k), x);
}

inline double divergence(const VectorField& h, std::span<const double> x) {
  ExprEval ev;
  return ev(divergence_expr(*h.metric, h.comps), x);
}

inline std::vector<double> lie_derivative_metric(const VectorField& h, std::span<const double> x) {
  const ChartMetric& g = *h.metric;
  ExprEval ev;
  TensorExpr lie = lie_metric_expr(g, h.comps);
  std::vector<double> out;
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) out.push_back(ev(lie.at({i, j}), x));
  return out;
}

inline double lie_derivative_scalar(const VectorField& h, const ScalarField& f,
                                    std::span<const double> x) {
  ExprEval ev;
  return ev(lie_scalar_expr(*h.metric, h.comps, f.u), x);
}

// ---------------------------------------------------------------------------

struct KillingDiagnostics {
  double mu = 0.0;    // conformal factor at the first sample
  double div_h = 0.0; // divergence at the first sample
  double deviation = 0.0;
  double mu_min = 0.0, mu_max = 0.0;
  bool is_homothety_normalized = false; // div(h) = n at every sample
};

/// Max-norm deviation of h from the conformal Killing condition over the
/// sample set, plus the observed conformal factor.
inline KillingDiagnostics killing_diagnostics(const VectorField& h,
                                              const std::vector<Point>& samples,
                                              double homothety_tol = 1e-9) {
  if (samples.empty()) throw PreconditionError("killing_diagnostics: empty sample set");
  const ChartMetric& g = *h.metric;
  const int n = g.dim();
  TensorExpr dev = conformal_deviation_expr(g, h.comps);
  const Expr divh = divergence_expr(g, h.comps);

  ExprEval ev;
  KillingDiagnostics out;
  out.is_homothety_normalized = true;
  bool first = true;
  for (const Point& x : samples) {
    const double d = ev(divh, x);
    const double mu = 2.0 * d / n;
    if (first) {
      out.mu = mu;
      out.div_h = d;
      out.mu_min = out.mu_max = mu;
      first = false;
    }
    out.mu_min = std::min(out.mu_min, mu);
    out.mu_max = std::max(out.mu_max, mu);
    if (std::fabs(d - n) > homothety_tol) out.is_homothety_normalized = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.deviation = std::max(out.deviation, std::fabs(ev(dev.at({i, j}), x)));
  }
  return out;
}

/// Rescale a homothety so that div(h) = n (conformal factor 2).
inline VectorField normalize_homothety(const VectorField& h, const std::vector<Point>& samples,
                                       double tol = 1e-9) {
  KillingDiagnostics d = killing_diagnostics(h, samples, tol);
  if (d.deviation > tol)
    throw PreconditionError("not a conformal Killing field: deviation " + std::to_string(d.deviation));
  if (d.mu_max - d.mu_min > tol)
    throw PreconditionError("not a homothety");
  if (std::fabs(d.mu) <= tol)
    throw PreconditionError("isometric Killing field");
  const Expr scale = constant(2.0 / d.mu);
  std::vector<Expr> comps;
  comps.reserve(h.comps.size());
  for (const Expr& c : h.comps) comps.push_back(mul(scale, c));
  return VectorField{h.metric, std::move(comps), h.label + " (normalized)"};
}

} // namespace rellich
