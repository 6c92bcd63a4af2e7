#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "rellich/expr.hpp"
#include "rellich/rng.hpp"

namespace rellich {

/// Region of the chart on which expressions may be evaluated.
struct Validity {
  enum class Kind { All, Box, Ball };
  Kind kind = Kind::All;
  Point lo, hi;      // Box
  Point center;      // Ball
  double radius = 0; // Ball

  static Validity all() { return {}; }
  static Validity box(Point lo, Point hi) {
    Validity v;
    v.kind = Kind::Box;
    v.lo = std::move(lo);
    v.hi = std::move(hi);
    return v;
  }
  static Validity ball(Point center, double radius) {
    Validity v;
    v.kind = Kind::Ball;
    v.center = std::move(center);
    v.radius = radius;
    return v;
  }

  bool contains(std::span<const double> x) const {
    switch (kind) {
      case Kind::All: return true;
      case Kind::Box:
        for (std::size_t i = 0; i < lo.size(); ++i)
          if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
      case Kind::Ball: {
        double r2 = 0.0;
        for (std::size_t i = 0; i < center.size(); ++i) {
          const double d = x[i] - center[i];
          r2 += d * d;
        }
        return r2 <= radius * radius;
      }
    }
    return false;
  }

  /// Deterministic interior sample, used for construction-time validation.
  Point sample(Lcg64& rng, int n) const {
    switch (kind) {
      case Kind::Box: return random_point_in_box(rng, lo, hi);
      case Kind::Ball: return random_point_in_ball(rng, center, 0.95 * radius);
      case Kind::All: {
        Point l(static_cast<std::size_t>(n), -1.0), h(static_cast<std::size_t>(n), 1.0);
        return random_point_in_box(rng, l, h);
      }
    }
    return Point(static_cast<std::size_t>(n), 0.0);
  }
};

/// Determinant of a symbolic matrix by cofactor expansion. Fine for the
/// small, mostly sparse matrices that appear here; constant folding removes
/// the zero branches.
inline Expr matrix_determinant(const std::vector<Expr>& m, int n) {
  if (n == 1) return m[0];
  Expr det = constant(0.0);
  std::vector<Expr> minor(static_cast<std::size_t>((n - 1) * (n - 1)));
  for (int j = 0; j < n; ++j) {
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor[static_cast<std::size_t>((r - 1) * (n - 1) + cc)] =
            m[static_cast<std::size_t>(r * n + c)];
        ++cc;
      }
    }
    Expr term = mul(m[static_cast<std::size_t>(j)], matrix_determinant(minor, n - 1));
    det = (j % 2 == 0) ? add(det, term) : sub(det, term);
  }
  return det;
}

/// Curvature tensors evaluated at a single chart point.
struct CurvatureAtPoint {
  int n = 0;
  std::vector<double> riemann;     // R^i_{jkl}, n^4
  std::vector<double> ricci_low;   // R_{ij}
  std::vector<double> ricci_mixed; // R^i_j
  double scalar = 0.0;

  double riem(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  double ric(int i, int j) const { return ricci_low[static_cast<std::size_t>(i * n + j)]; }
  double ric_mixed(int i, int j) const { return ricci_mixed[static_cast<std::size_t>(i * n + j)]; }
};

/// A chart metric g_ij together with its derived symbolic objects: inverse,
/// volume density, Christoffel symbols and curvature tensors. Everything is
/// built once as expression DAGs and evaluated per point afterwards; the
/// object is immutable after construction and safe for concurrent evaluation.
class ChartMetric {
public:
  ChartMetric(int n, std::vector<Expr> g, Validity validity, std::string label)
      : n_(n), g_(std::move(g)), validity_(std::move(validity)), label_(std::move(label)) {
    if (n_ < 1 || g_.size() != static_cast<std::size_t>(n_ * n_))
      throw PreconditionError("metric: expected " + std::to_string(n_ * n_) + " components");
    build_inverse();
    build_christoffel();
    build_curvature();
    validate();
  }

  int dim() const { return n_; }
  const std::string& label() const { return label_; }
  const Validity& validity() const { return validity_; }

  const Expr& g(int i, int j) const { return g_[static_cast<std::size_t>(i * n_ + j)]; }
  const Expr& ginv(int i, int j) const { return ginv_[static_cast<std::size_t>(i * n_ + j)]; }
  const Expr& det() const { return det_; }
  const Expr& sqrt_det() const { return sqrt_det_; }
  /// Gamma^k_{ij}
  const Expr& christoffel(int k, int i, int j) const {
    return christoffel_[static_cast<std::size_t>((k * n_ + i) * n_ + j)];
  }
  /// R^i_{jkl}
  const Expr& riemann(int i, int j, int k, int l) const {
    return riemann_[static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l)];
  }
  const Expr& ricci_low(int i, int j) const { return ricci_low_[static_cast<std::size_t>(i * n_ + j)]; }
  const Expr& ricci_mixed(int i, int j) const { return ricci_mixed_[static_cast<std::size_t>(i * n_ + j)]; }
  const Expr& scalar_curvature() const { return scalar_; }

  std::vector<double> metric_at(std::span<const double> x, ExprEval& ev) const {
    std::vector<double> m(static_cast<std::size_t>(n_ * n_));
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = ev(g_[k], x);
    return m;
  }

  std::vector<double> inverse_at(std::span<const double> x, ExprEval& ev) const {
    std::vector<double> m(static_cast<std::size_t>(n_ * n_));
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = ev(ginv_[k], x);
    return m;
  }

  /// Gamma^k_{ij} at x, layout [k][i][j].
  std::vector<double> christoffel_at(std::span<const double> x, ExprEval& ev) const {
    check_regular(x, ev);
    std::vector<double> m(christoffel_.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = ev(christoffel_[k], x);
    return m;
  }

  CurvatureAtPoint curvature_at(std::span<const double> x, ExprEval& ev) const {
    check_regular(x, ev);
    CurvatureAtPoint c;
    c.n = n_;
    c.riemann.resize(riemann_.size());
    for (std::size_t k = 0; k < riemann_.size(); ++k) c.riemann[k] = ev(riemann_[k], x);
    c.ricci_low.resize(ricci_low_.size());
    for (std::size_t k = 0; k < ricci_low_.size(); ++k) c.ricci_low[k] = ev(ricci_low_[k], x);
    c.ricci_mixed.resize(ricci_mixed_.size());
    for (std::size_t k = 0; k < ricci_mixed_.size(); ++k) c.ricci_mixed[k] = ev(ricci_mixed_[k], x);
    c.scalar = ev(scalar_, x);
    return c;
  }

  double volume_density(std::span<const double> x, ExprEval& ev) const {
    const double d = ev(det_, x);
    if (d <= 0.0)
      throw EvalError("metric determinant non-positive at sampled point (" + label_ + ")");
    return std::sqrt(d);
  }

private:
  void check_regular(std::span<const double> x, ExprEval& ev) const {
    if (ev(det_, x) <= 0.0)
      throw EvalError("singular metric at evaluation point (" + label_ + ")");
  }

  void build_inverse() {
    det_ = matrix_determinant(g_, n_);
    sqrt_det_ = sqrt_expr(det_);
    ginv_.resize(g_.size());
    if (n_ == 1) {
      ginv_[0] = div(constant(1.0), g_[0]);
      return;
    }
    std::vector<Expr> minor(static_cast<std::size_t>((n_ - 1) * (n_ - 1)));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        int rr = 0;
        for (int r = 0; r < n_; ++r) {
          if (r == i) continue;
          int cc = 0;
          for (int c = 0; c < n_; ++c) {
            if (c == j) continue;
            minor[static_cast<std::size_t>(rr * (n_ - 1) + cc)] =
                g_[static_cast<std::size_t>(r * n_ + c)];
            ++cc;
          }
          ++rr;
        }
        Expr cof = matrix_determinant(minor, n_ - 1);
        if ((i + j) % 2 != 0) cof = neg(cof);
        // adjugate transpose: ginv[j][i] = cof(i,j)/det
        ginv_[static_cast<std::size_t>(j * n_ + i)] = div(cof, det_);
      }
    }
  }

  void build_christoffel() {
    // dg[s][i][j] = d_s g_ij
    std::vector<Expr> dg(static_cast<std::size_t>(n_ * n_ * n_));
    for (int s = 0; s < n_; ++s)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          dg[static_cast<std::size_t>((s * n_ + i) * n_ + j)] = differentiate(g(i, j), s);
    auto dgat = [&](int s, int i, int j) -> const Expr& {
      return dg[static_cast<std::size_t>((s * n_ + i) * n_ + j)];
    };

    christoffel_.resize(static_cast<std::size_t>(n_ * n_ * n_));
    for (int k = 0; k < n_; ++k)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          Expr sum = constant(0.0);
          for (int s = 0; s < n_; ++s) {
            Expr t = sub(add(dgat(i, s, j), dgat(j, s, i)), dgat(s, i, j));
            sum = add(sum, mul(ginv(k, s), t));
          }
          christoffel_[static_cast<std::size_t>((k * n_ + i) * n_ + j)] =
              mul(constant(0.5), sum);
        }
  }

  void build_curvature() {
    // R^i_{jkl} = d_k G^i_{jl} - d_l G^i_{jk} + G^i_{ks} G^s_{jl} - G^i_{ls} G^s_{jk}
    // Antisymmetry in (k,l) holds exactly: only k<l is computed, k>l negated.
    riemann_.assign(static_cast<std::size_t>(n_ * n_ * n_ * n_), constant(0.0));
    auto set = [&](int i, int j, int k, int l, Expr e) {
      riemann_[static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l)] = std::move(e);
    };
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          for (int l = k + 1; l < n_; ++l) {
            Expr e = sub(differentiate(christoffel(i, j, l), k),
                         differentiate(christoffel(i, j, k), l));
            for (int s = 0; s < n_; ++s) {
              e = add(e, mul(christoffel(i, k, s), christoffel(s, j, l)));
              e = sub(e, mul(christoffel(i, l, s), christoffel(s, j, k)));
            }
            set(i, j, k, l, e);
            set(i, j, l, k, neg(e));
          }

    ricci_low_.resize(static_cast<std::size_t>(n_ * n_));
    for (int j = 0; j < n_; ++j)
      for (int l = 0; l < n_; ++l) {
        Expr sum = constant(0.0);
        for (int i = 0; i < n_; ++i) sum = add(sum, riemann(i, j, i, l));
        ricci_low_[static_cast<std::size_t>(j * n_ + l)] = sum;
      }

    ricci_mixed_.resize(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        Expr sum = constant(0.0);
        for (int s = 0; s < n_; ++s) sum = add(sum, mul(ginv(i, s), ricci_low(s, j)));
        ricci_mixed_[static_cast<std::size_t>(i * n_ + j)] = sum;
      }

    scalar_ = constant(0.0);
    for (int j = 0; j < n_; ++j)
      for (int l = 0; l < n_; ++l)
        scalar_ = add(scalar_, mul(ginv(j, l), ricci_low(j, l)));
  }

  /// Sampled construction-time checks: symmetry, positivity, g * g^{-1} = id.
  void validate() const {
    Lcg64 rng(0x9d2c5680u ^ static_cast<std::uint64_t>(n_));
    ExprEval ev;
    for (int trial = 0; trial < 20; ++trial) {
      const Point x = validity_.sample(rng, n_);
      for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
          if (std::fabs(ev(g(i, j), x) - ev(g(j, i), x)) > 1e-14)
            throw PreconditionError("metric not symmetric at sampled point (" + label_ + ")");
      if (ev(det_, x) <= 0.0)
        throw PreconditionError("metric determinant not positive at sampled point (" + label_ + ")");
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) {
          double s = 0.0;
          for (int k = 0; k < n_; ++k) s += ev(ginv(i, k), x) * ev(g(k, j), x);
          if (std::fabs(s - (i == j ? 1.0 : 0.0)) > 1e-12)
            throw PreconditionError("metric inverse check failed at sampled point (" + label_ + ")");
        }
    }
  }

  int n_;
  std::vector<Expr> g_;
  Validity validity_;
  std::string label_;
  std::vector<Expr> ginv_, christoffel_, riemann_, ricci_low_, ricci_mixed_;
  Expr det_, sqrt_det_, scalar_;
};

using MetricPtr = std::shared_ptr<const ChartMetric>;

} // namespace rellich
