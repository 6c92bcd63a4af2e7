#pragma once

#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "rellich/diffops.hpp"

namespace rellich {

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1, 1], computed once per order by Newton
// iteration on the Legendre recurrence.

struct GaussRule {
  std::vector<double> nodes, weights;
};

inline const GaussRule& gauss_legendre(int q) {
  if (q < 1) throw PreconditionError("quadrature order must be >= 1");
  static std::mutex mu;
  static std::unordered_map<int, GaussRule> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;

  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(q));
  r.weights.resize(static_cast<std::size_t>(q));
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.nodes[static_cast<std::size_t>(q - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(q - 1 - i)] = w;
  }
  return cache.emplace(q, std::move(r)).first->second;
}

/// Deterministic pairwise (cascade) summation; the reduction order depends
/// only on the vector length, so reports are bit-stable across runs.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct QuadratureSpec {
  int volume_order = 16;
  int boundary_order = 24;
};

// ---------------------------------------------------------------------------
// Domains.

/// A boundary patch: a smooth map from a parameter rectangle in R^{n-1}
/// into the chart, given componentwise as expressions in t1..t_{n-1}.
struct BoundaryPatch {
  std::vector<Expr> map; // n exprs in the parameters
  Point lo, hi;          // parameter rectangle
  int face_axis = -1;    // box faces only
  double face_sign = 0.0;
};

/// Axis-aligned box or chart ball (the level-set region |x-c|^2 - r^2 <= 0
/// with its explicit spherical boundary parametrization). Chart caps are
/// balls centered at the origin.
class Domain {
public:
  enum class Kind { Box, Ball };

  static Domain box(Point lo, Point hi) {
    Domain d;
    d.kind_ = Kind::Box;
    d.n_ = static_cast<int>(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw PreconditionError("box domain: need lo < hi on every axis");
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    d.build_box_patches();
    return d;
  }

  static Domain ball(Point center, double radius) {
    if (radius <= 0.0) throw PreconditionError("ball domain: radius must be positive");
    Domain d;
    d.kind_ = Kind::Ball;
    d.n_ = static_cast<int>(center.size());
    d.center_ = std::move(center);
    d.radius_ = radius;
    d.build_level_set();
    d.build_ball_patches();
    return d;
  }

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const Expr& level_set() const { return level_set_; }
  const std::vector<BoundaryPatch>& boundary_patches() const { return patches_; }
  const std::vector<Expr>& volume_map() const { return volume_map_; }
  const Expr& volume_jacobian() const { return volume_jac_; }
  const Point& volume_param_lo() const { return vol_lo_; }
  const Point& volume_param_hi() const { return vol_hi_; }

  bool contains(std::span<const double> x) const {
    if (kind_ == Kind::Box) {
      for (int i = 0; i < n_; ++i)
        if (x[static_cast<std::size_t>(i)] < lo_[static_cast<std::size_t>(i)] ||
            x[static_cast<std::size_t>(i)] > hi_[static_cast<std::size_t>(i)])
          return false;
      return true;
    }
    double r2 = 0.0;
    for (int i = 0; i < n_; ++i) {
      const double d = x[static_cast<std::size_t>(i)] - center_[static_cast<std::size_t>(i)];
      r2 += d * d;
    }
    return r2 <= radius_ * radius_;
  }

  Point sample_interior(Lcg64& rng) const {
    return kind_ == Kind::Box ? random_point_in_box(rng, lo_, hi_)
                              : random_point_in_ball(rng, center_, radius_);
  }

private:
  // omega(t): unit sphere parametrized by angles t1..t_{n-1};
  // t1..t_{n-2} in [0,pi], t_{n-1} in [0,2pi].
  static std::vector<Expr> unit_sphere_map(int n, int first_param) {
    std::vector<Expr> omega(static_cast<std::size_t>(n));
    Expr sin_prod = constant(1.0);
    for (int i = 0; i < n - 1; ++i) {
      const Expr t = coordinate(first_param + i);
      omega[static_cast<std::size_t>(i)] = mul(sin_prod, cos_expr(t));
      sin_prod = mul(sin_prod, sin_expr(t));
    }
    omega[static_cast<std::size_t>(n - 1)] = sin_prod;
    return omega;
  }

  void build_level_set() {
    Expr phi = constant(-radius_ * radius_);
    for (int i = 0; i < n_; ++i) {
      const Expr d = sub(coordinate(i), constant(center_[static_cast<std::size_t>(i)]));
      phi = add(phi, mul(d, d));
    }
    level_set_ = phi;
  }

  void build_box_patches() {
    for (int k = 0; k < n_; ++k)
      for (int side = 0; side < 2; ++side) {
        BoundaryPatch p;
        p.face_axis = k;
        p.face_sign = side == 0 ? -1.0 : 1.0;
        p.map.resize(static_cast<std::size_t>(n_));
        int param = 0;
        for (int i = 0; i < n_; ++i) {
          if (i == k) {
            p.map[static_cast<std::size_t>(i)] =
                constant(side == 0 ? lo_[static_cast<std::size_t>(i)] : hi_[static_cast<std::size_t>(i)]);
          } else {
            p.map[static_cast<std::size_t>(i)] = coordinate(param);
            p.lo.push_back(lo_[static_cast<std::size_t>(i)]);
            p.hi.push_back(hi_[static_cast<std::size_t>(i)]);
            ++param;
          }
        }
        patches_.push_back(std::move(p));
      }
  }

  void build_ball_patches() {
    BoundaryPatch p;
    std::vector<Expr> omega = unit_sphere_map(n_, 0);
    p.map.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      p.map[static_cast<std::size_t>(i)] =
          add(constant(center_[static_cast<std::size_t>(i)]),
              mul(constant(radius_), omega[static_cast<std::size_t>(i)]));
    for (int a = 0; a < n_ - 2; ++a) {
      p.lo.push_back(0.0);
      p.hi.push_back(std::numbers::pi);
    }
    p.lo.push_back(0.0);
    p.hi.push_back(2.0 * std::numbers::pi);
    patches_.push_back(std::move(p));

    // volume map x = c + rho * omega(t), params (rho, t1..t_{n-1})
    std::vector<Expr> omega_v = unit_sphere_map(n_, 1);
    volume_map_.resize(static_cast<std::size_t>(n_));
    const Expr rho = coordinate(0);
    for (int i = 0; i < n_; ++i)
      volume_map_[static_cast<std::size_t>(i)] =
          add(constant(center_[static_cast<std::size_t>(i)]),
              mul(rho, omega_v[static_cast<std::size_t>(i)]));
    std::vector<Expr> jac(static_cast<std::size_t>(n_ * n_));
    for (int i = 0; i < n_; ++i)
      for (int a = 0; a < n_; ++a)
        jac[static_cast<std::size_t>(i * n_ + a)] = differentiate(volume_map_[static_cast<std::size_t>(i)], a);
    volume_jac_ = matrix_determinant(jac, n_);

    vol_lo_.push_back(0.0);
    vol_hi_.push_back(radius_);
    for (int a = 0; a < n_ - 2; ++a) {
      vol_lo_.push_back(0.0);
      vol_hi_.push_back(std::numbers::pi);
    }
    vol_lo_.push_back(0.0);
    vol_hi_.push_back(2.0 * std::numbers::pi);
  }

  Kind kind_ = Kind::Box;
  int n_ = 0;
  Point lo_, hi_, center_;
  double radius_ = 0.0;
  Expr level_set_;
  std::vector<BoundaryPatch> patches_;
  std::vector<Expr> volume_map_;
  Expr volume_jac_;
  Point vol_lo_, vol_hi_;
};

// ---------------------------------------------------------------------------
// Precomputed quadrature rules (node sets). Built once per (domain, metric,
// spec); integration is then a deterministic weighted pairwise sum.

struct VolumeRule {
  int n = 0;
  std::vector<double> coords; // count * n
  std::vector<double> coeff;  // w * |jacobian| * sqrt(det g)
  std::size_t count() const { return coeff.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
};

/// Boundary node: chart point, outward unit conormal, induced surface
/// density and parameter-space weight.
struct BoundaryRule {
  int n = 0;
  std::vector<double> coords;  // count * n
  std::vector<double> normals; // count * n, covariant nu_i
  std::vector<double> density; // sqrt(det(J^T G J))
  std::vector<double> weight;  // parameter-space quadrature weight
  std::size_t count() const { return weight.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
  std::span<const double> normal(std::size_t i) const {
    return {normals.data() + i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
  }
};

namespace detail {

struct TensorGrid {
  std::vector<const GaussRule*> rules;
  Point lo, hi;
  std::size_t count = 1;

  TensorGrid(const Point& l, const Point& h, int order) : lo(l), hi(h) {
    for (std::size_t a = 0; a < lo.size(); ++a) {
      rules.push_back(&gauss_legendre(order));
      count *= rules.back()->nodes.size();
    }
  }

  /// Node `i` in row-major order; fills params and returns the weight
  /// (including the affine interval scaling).
  double node(std::size_t i, Point& params) const {
    double w = 1.0;
    for (std::size_t a = lo.size(); a-- > 0;) {
      const auto& r = *rules[a];
      const std::size_t q = r.nodes.size();
      const std::size_t k = i % q;
      i /= q;
      const double half = 0.5 * (hi[a] - lo[a]);
      params[a] = lo[a] + half * (1.0 + r.nodes[k]);
      w *= half * r.weights[k];
    }
    return w;
  }
};

inline void check_validity(const ChartMetric& g, std::span<const double> x) {
  if (!g.validity().contains(x))
    throw PreconditionError("quadrature node outside the metric validity region");
}

} // namespace detail

/// Covariant outward unit normal of a level-set boundary at x.
inline std::vector<double> level_set_normal(const Expr& phi, const ChartMetric& g,
                                            std::span<const double> x, ExprEval& ev) {
  const int n = g.dim();
  std::vector<double> grad(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grad[static_cast<std::size_t>(i)] = ev(differentiate(phi, i), x);
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      norm2 += ev(g.ginv(i, j), x) * grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(j)];
  if (norm2 <= 0.0) throw EvalError("level-set boundary is degenerate: |grad phi|_g = 0");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : grad) v *= inv;
  return grad;
}

/// Covariant outward unit normal at a boundary point of `d`. Box points are
/// matched to their face; level-set boundaries use grad(phi)/|grad(phi)|_g.
inline std::vector<double> outward_normal(const Domain& d, const ChartMetric& g,
                                          std::span<const double> x, ExprEval& ev) {
  const int n = d.dim();
  if (d.kind() == Domain::Kind::Ball) {
    auto nu = level_set_normal(d.level_set(), g, x, ev);
    // outwardness: phi increases along the raised normal
    double along = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        along += ev(g.ginv(i, j), x) * nu[static_cast<std::size_t>(j)] *
                 ev(differentiate(d.level_set(), i), x);
    if (along <= 0.0) throw EvalError("outward normal check failed on level-set boundary");
    return nu;
  }
  int axis = -1;
  double sign = 0.0, best = 1e-9;
  for (int k = 0; k < n; ++k) {
    const double dl = std::fabs(x[static_cast<std::size_t>(k)] - d.lo()[static_cast<std::size_t>(k)]);
    const double dh = std::fabs(x[static_cast<std::size_t>(k)] - d.hi()[static_cast<std::size_t>(k)]);
    if (dl < best) { best = dl; axis = k; sign = -1.0; }
    if (dh < best) { best = dh; axis = k; sign = 1.0; }
  }
  if (axis < 0) throw PreconditionError("point is not on the box boundary");
  std::vector<double> nu(static_cast<std::size_t>(n), 0.0);
  nu[static_cast<std::size_t>(axis)] = sign / std::sqrt(ev(g.ginv(axis, axis), x));
  return nu;
}

inline VolumeRule make_volume_rule(const Domain& d, const ChartMetric& g,
                                   const QuadratureSpec& spec) {
  if (spec.volume_order < 1) throw PreconditionError("volume quadrature order must be >= 1");
  const int n = d.dim();
  VolumeRule rule;
  rule.n = n;
  ExprEval ev;

  if (d.kind() == Domain::Kind::Box) {
    detail::TensorGrid grid(d.lo(), d.hi(), spec.volume_order);
    rule.coords.reserve(grid.count * static_cast<std::size_t>(n));
    rule.coeff.reserve(grid.count);
    Point x(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double w = grid.node(i, x);
      detail::check_validity(g, x);
      rule.coords.insert(rule.coords.end(), x.begin(), x.end());
      rule.coeff.push_back(w * g.volume_density(x, ev));
    }
    return rule;
  }

  detail::TensorGrid grid(d.volume_param_lo(), d.volume_param_hi(), spec.volume_order);
  rule.coords.reserve(grid.count * static_cast<std::size_t>(n));
  rule.coeff.reserve(grid.count);
  Point params(d.volume_param_lo().size());
  Point x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double w = grid.node(i, params);
    for (int c = 0; c < n; ++c) x[static_cast<std::size_t>(c)] = ev(d.volume_map()[static_cast<std::size_t>(c)], params);
    detail::check_validity(g, x);
    const double jac = std::fabs(ev(d.volume_jacobian(), params));
    rule.coords.insert(rule.coords.end(), x.begin(), x.end());
    rule.coeff.push_back(w * jac * g.volume_density(x, ev));
  }
  return rule;
}

inline BoundaryRule make_boundary_rule(const Domain& d, const ChartMetric& g,
                                       const QuadratureSpec& spec) {
  if (spec.boundary_order < 1) throw PreconditionError("boundary quadrature order must be >= 1");
  const int n = d.dim();
  BoundaryRule rule;
  rule.n = n;
  ExprEval ev;

  for (const BoundaryPatch& patch : d.boundary_patches()) {
    const int np = static_cast<int>(patch.lo.size());
    // Jacobian J[i][a] = dP_i/dt_a and pulled-back metric G(P(t)).
    std::vector<Expr> jac(static_cast<std::size_t>(n * np));
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < np; ++a)
        jac[static_cast<std::size_t>(i * np + a)] = differentiate(patch.map[static_cast<std::size_t>(i)], a);
    std::vector<Expr> gp(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gp[static_cast<std::size_t>(i * n + j)] = substitute(g.g(i, j), patch.map);
    std::vector<Expr> gram(static_cast<std::size_t>(np * np));
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b) {
        Expr s = constant(0.0);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            s = add(s, mul(mul(jac[static_cast<std::size_t>(i * np + a)],
                               gp[static_cast<std::size_t>(i * n + j)]),
                           jac[static_cast<std::size_t>(j * np + b)]));
        gram[static_cast<std::size_t>(a * np + b)] = s;
      }
    const Expr density_expr = sqrt_expr(matrix_determinant(gram, np));

    detail::TensorGrid grid(patch.lo, patch.hi, spec.boundary_order);
    Point params(static_cast<std::size_t>(np));
    Point x(static_cast<std::size_t>(n));
    for (std::size_t idx = 0; idx < grid.count; ++idx) {
      const double w = grid.node(idx, params);
      for (int c = 0; c < n; ++c) x[static_cast<std::size_t>(c)] = ev(patch.map[static_cast<std::size_t>(c)], params);
      detail::check_validity(g, x);
      const double density = ev(density_expr, params);
      if (!(density > 0.0)) throw EvalError("degenerate boundary parametrization Jacobian");

      std::vector<double> nu;
      if (patch.face_axis >= 0) {
        nu.assign(static_cast<std::size_t>(n), 0.0);
        nu[static_cast<std::size_t>(patch.face_axis)] =
            patch.face_sign / std::sqrt(ev(g.ginv(patch.face_axis, patch.face_axis), x));
      } else {
        if (std::fabs(ev(d.level_set(), x)) > 1e-10)
          throw PreconditionError("boundary parametrization does not satisfy the level set");
        nu = level_set_normal(d.level_set(), g, x, ev);
      }
      double unit = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          unit += ev(g.ginv(i, j), x) * nu[static_cast<std::size_t>(i)] * nu[static_cast<std::size_t>(j)];
      if (std::fabs(unit - 1.0) > 1e-10) throw EvalError("boundary normal is not g-unit");

      rule.coords.insert(rule.coords.end(), x.begin(), x.end());
      rule.normals.insert(rule.normals.end(), nu.begin(), nu.end());
      rule.density.push_back(density);
      rule.weight.push_back(w);
    }
  }
  return rule;
}

// ---------------------------------------------------------------------------
// Integration. Node values are computed independently (optionally across
// threads) into an indexed buffer, then reduced by pairwise summation, so
// results do not depend on the thread count.

namespace detail {

template <class F>
inline void map_indexed(std::size_t count, F&& f) {
  const unsigned hw = std::thread::hardware_concurrency();
  const unsigned workers = count < 4096 ? 1u : std::min(hw == 0 ? 1u : hw, 8u);
  if (workers <= 1) {
    ExprEval ev;
    for (std::size_t i = 0; i < count; ++i) f(i, ev);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex err_mu;
  std::exception_ptr first_error;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      ExprEval ev;
      const std::size_t begin = static_cast<std::size_t>(t) * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      try {
        for (std::size_t i = begin; i < end; ++i) f(i, ev);
      } catch (...) {
        std::scoped_lock lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string point_string(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

} // namespace detail

using VolumeIntegrand = std::function<double(std::span<const double>, ExprEval&)>;

struct BoundaryPointData {
  std::span<const double> x;
  std::span<const double> nu; // covariant, g-unit, outward
  double density = 0.0;
};

using BoundaryIntegrand = std::function<double(const BoundaryPointData&, ExprEval&)>;

inline double integrate(const VolumeRule& rule, const VolumeIntegrand& f) {
  std::vector<double> vals(rule.count());
  detail::map_indexed(rule.count(), [&](std::size_t i, ExprEval& ev) {
    try {
      vals[i] = rule.coeff[i] * f(rule.point(i), ev);
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " at volume node " + detail::point_string(rule.point(i)));
    }
  });
  return pairwise_sum(vals);
}

inline double integrate(const VolumeRule& rule, const Expr& f) {
  return integrate(rule, [&f](std::span<const double> x, ExprEval& ev) { return ev(f, x); });
}

inline double integrate(const BoundaryRule& rule, const BoundaryIntegrand& f) {
  std::vector<double> vals(rule.count());
  detail::map_indexed(rule.count(), [&](std::size_t i, ExprEval& ev) {
    try {
      BoundaryPointData bp{rule.point(i), rule.normal(i), rule.density[i]};
      vals[i] = rule.weight[i] * rule.density[i] * f(bp, ev);
    } catch (const EvalError& e) {
      throw EvalError(std::string(e.what()) + " at boundary node " + detail::point_string(rule.point(i)));
    }
  });
  return pairwise_sum(vals);
}

/// integral over d of f dV with dV = sqrt(det g) dx.
inline double integrate_volume(const VolumeIntegrand& f, const Domain& d, const ChartMetric& g,
                               const QuadratureSpec& spec) {
  return integrate(make_volume_rule(d, g, spec), f);
}

inline double integrate_volume(const Expr& f, const Domain& d, const ChartMetric& g,
                               const QuadratureSpec& spec) {
  return integrate(make_volume_rule(d, g, spec), f);
}

/// integral over the boundary of d of f dS.
inline double integrate_boundary(const BoundaryIntegrand& f, const Domain& d,
                                 const ChartMetric& g, const QuadratureSpec& spec) {
  return integrate(make_boundary_rule(d, g, spec), f);
}

/// | int div(w) dV - int w^i nu_i dS |; vanishes to quadrature accuracy.
inline double divergence_theorem_residual(const VectorField& w, const Domain& d,
                                          const ChartMetric& g, const QuadratureSpec& spec) {
  const Expr divw = divergence_expr(g, w.comps);
  const double vol = integrate_volume(divw, d, g, spec);
  const auto& comps = w.comps;
  const double flux = integrate_boundary(
      [&comps](const BoundaryPointData& bp, ExprEval& ev) {
        double s = 0.0;
        for (std::size_t i = 0; i < bp.nu.size(); ++i) s += ev(comps[i], bp.x) * bp.nu[i];
        return s;
      },
      d, g, spec);
  return std::fabs(vol - flux);
}

/// Deterministic boundary sample points (used by pointwise boundary checks).
inline std::vector<std::pair<Point, std::vector<double>>>
boundary_samples(const Domain& d, const ChartMetric& g, int count, std::uint64_t seed) {
  Lcg64 rng(seed);
  ExprEval ev;
  std::vector<std::pair<Point, std::vector<double>>> out;
  const auto& patches = d.boundary_patches();
  for (int k = 0; k < count; ++k) {
    const BoundaryPatch& patch = patches[static_cast<std::size_t>(rng.below(patches.size()))];
    Point params(patch.lo.size());
    for (std::size_t a = 0; a < params.size(); ++a) params[a] = rng.uniform(patch.lo[a], patch.hi[a]);
    Point x(static_cast<std::size_t>(d.dim()));
    for (int c = 0; c < d.dim(); ++c) x[static_cast<std::size_t>(c)] = ev(patch.map[static_cast<std::size_t>(c)], params);
    std::vector<double> nu;
    if (patch.face_axis >= 0) {
      nu.assign(static_cast<std::size_t>(d.dim()), 0.0);
      nu[static_cast<std::size_t>(patch.face_axis)] =
          patch.face_sign / std::sqrt(ev(g.ginv(patch.face_axis, patch.face_axis), x));
    } else {
      nu = level_set_normal(d.level_set(), g, x, ev);
    }
    out.emplace_back(std::move(x), std::move(nu));
  }
  return out;
}

} // namespace rellich
