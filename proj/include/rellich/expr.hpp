#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rellich/errors.hpp"

namespace rellich {

enum class ExprKind : std::uint8_t {
  Constant,
  Coordinate,
  Add,
  Mul,
  Div,
  Pow, // real constant exponent
  Neg,
  Exp,
  Log,
  Sin,
  Cos,
  Sinh,
  Cosh,
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable expression node. Nodes are interned (hash-consed): structurally
/// equal expressions share one node, so repeated differentiation builds a
/// compact DAG instead of a tree.
struct ExprNode {
  ExprKind kind;
  double value = 0.0;    // Constant
  int coord = -1;        // Coordinate
  double exponent = 0.0; // Pow
  Expr a, b;
  std::uint32_t id = 0; // globally unique, assigned at interning
};

namespace detail {

struct NodeKey {
  ExprKind kind;
  std::uint64_t value_bits;
  int coord;
  std::uint64_t exponent_bits;
  const ExprNode* a;
  const ExprNode* b;

  bool operator==(const NodeKey& o) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.kind);
    auto mix = [&h](std::size_t v) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::size_t>(k.value_bits));
    mix(static_cast<std::size_t>(k.coord) + 1469598103934665603ULL);
    mix(static_cast<std::size_t>(k.exponent_bits));
    mix(reinterpret_cast<std::size_t>(k.a));
    mix(reinterpret_cast<std::size_t>(k.b));
    return h;
  }
};

/// Process-wide intern table plus derivative cache. Construction is guarded
/// by a mutex; evaluation never touches this state.
struct ExprUniverse {
  std::mutex mu;
  std::unordered_map<NodeKey, Expr, NodeKeyHash> interned;
  std::unordered_map<std::uint64_t, Expr> derivatives; // (node id << 16) | axis
  std::uint32_t next_id = 0;

  static ExprUniverse& instance() {
    static ExprUniverse u;
    return u;
  }
};

inline Expr intern(ExprKind kind, double value, int coord, double exponent,
                   Expr a, Expr b) {
  NodeKey key{kind,
              std::bit_cast<std::uint64_t>(value),
              coord,
              std::bit_cast<std::uint64_t>(exponent),
              a.get(),
              b.get()};
  auto& u = ExprUniverse::instance();
  std::scoped_lock lock(u.mu);
  auto it = u.interned.find(key);
  if (it != u.interned.end()) return it->second;
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->value = value;
  node->coord = coord;
  node->exponent = exponent;
  node->a = std::move(a);
  node->b = std::move(b);
  node->id = u.next_id++;
  Expr e = node;
  u.interned.emplace(key, e);
  return e;
}

} // namespace detail

inline Expr constant(double v) {
  return detail::intern(ExprKind::Constant, v, -1, 0.0, nullptr, nullptr);
}

/// Coordinate x^{i}, 0-based.
inline Expr coordinate(int i) {
  return detail::intern(ExprKind::Coordinate, 0.0, i, 0.0, nullptr, nullptr);
}

inline bool is_constant(const Expr& e, double v) {
  return e->kind == ExprKind::Constant && e->value == v;
}

inline bool is_constant(const Expr& e) { return e->kind == ExprKind::Constant; }

inline Expr add(Expr a, Expr b) {
  if (is_constant(a) && is_constant(b)) return constant(a->value + b->value);
  if (is_constant(a, 0.0)) return b;
  if (is_constant(b, 0.0)) return a;
  if (a->id > b->id) std::swap(a, b); // canonical order improves sharing
  return detail::intern(ExprKind::Add, 0.0, -1, 0.0, std::move(a), std::move(b));
}

inline Expr mul(Expr a, Expr b) {
  if (is_constant(a) && is_constant(b)) return constant(a->value * b->value);
  if (is_constant(a, 0.0) || is_constant(b, 0.0)) return constant(0.0);
  if (is_constant(a, 1.0)) return b;
  if (is_constant(b, 1.0)) return a;
  if (a->id > b->id) std::swap(a, b);
  return detail::intern(ExprKind::Mul, 0.0, -1, 0.0, std::move(a), std::move(b));
}

inline Expr neg(Expr a) {
  if (is_constant(a)) return constant(-a->value);
  if (a->kind == ExprKind::Neg) return a->a;
  return detail::intern(ExprKind::Neg, 0.0, -1, 0.0, std::move(a), nullptr);
}

inline Expr sub(Expr a, Expr b) { return add(std::move(a), neg(std::move(b))); }

inline Expr div(Expr a, Expr b) {
  if (is_constant(b) && b->value != 0.0) {
    if (is_constant(a)) return constant(a->value / b->value);
    if (b->value == 1.0) return a;
  }
  if (is_constant(a, 0.0)) return constant(0.0);
  return detail::intern(ExprKind::Div, 0.0, -1, 0.0, std::move(a), std::move(b));
}

inline Expr pow_expr(Expr base, double p) {
  if (p == 0.0) return constant(1.0);
  if (p == 1.0) return base;
  if (is_constant(base)) {
    const double v = std::pow(base->value, p);
    if (std::isfinite(v)) return constant(v);
  }
  return detail::intern(ExprKind::Pow, 0.0, -1, p, std::move(base), nullptr);
}

namespace detail {
inline Expr unary(ExprKind k, Expr a, double (*f)(double)) {
  if (is_constant(a)) {
    const double v = f(a->value);
    if (std::isfinite(v)) return constant(v);
  }
  return intern(k, 0.0, -1, 0.0, std::move(a), nullptr);
}
} // namespace detail

inline Expr exp_expr(Expr a) { return detail::unary(ExprKind::Exp, std::move(a), [](double v) { return std::exp(v); }); }
inline Expr log_expr(Expr a) {
  if (is_constant(a) && a->value > 0.0) return constant(std::log(a->value));
  return detail::intern(ExprKind::Log, 0.0, -1, 0.0, std::move(a), nullptr);
}
inline Expr sin_expr(Expr a) { return detail::unary(ExprKind::Sin, std::move(a), [](double v) { return std::sin(v); }); }
inline Expr cos_expr(Expr a) { return detail::unary(ExprKind::Cos, std::move(a), [](double v) { return std::cos(v); }); }
inline Expr sinh_expr(Expr a) { return detail::unary(ExprKind::Sinh, std::move(a), [](double v) { return std::sinh(v); }); }
inline Expr cosh_expr(Expr a) { return detail::unary(ExprKind::Cosh, std::move(a), [](double v) { return std::cosh(v); }); }
inline Expr sqrt_expr(Expr a) { return pow_expr(std::move(a), 0.5); }

/// Short textual form, truncated below `depth`; used in error messages and
/// debugging output.
inline std::string to_string(const Expr& e, int depth = 6) {
  if (!e) return "<null>";
  if (depth <= 0) return "...";
  std::ostringstream os;
  switch (e->kind) {
    case ExprKind::Constant: os << e->value; break;
    case ExprKind::Coordinate: os << "x" << (e->coord + 1); break;
    case ExprKind::Add: os << "(" << to_string(e->a, depth - 1) << " + " << to_string(e->b, depth - 1) << ")"; break;
    case ExprKind::Mul: os << "(" << to_string(e->a, depth - 1) << " * " << to_string(e->b, depth - 1) << ")"; break;
    case ExprKind::Div: os << "(" << to_string(e->a, depth - 1) << " / " << to_string(e->b, depth - 1) << ")"; break;
    case ExprKind::Pow: os << "(" << to_string(e->a, depth - 1) << ")^" << e->exponent; break;
    case ExprKind::Neg: os << "-(" << to_string(e->a, depth - 1) << ")"; break;
    case ExprKind::Exp: os << "exp(" << to_string(e->a, depth - 1) << ")"; break;
    case ExprKind::Log: os << "log(" << to_string(e->a, depth - 1) << ")"; break;
    case ExprKind::Sin: os << "sin(" << to_string(e->a, depth - 1) << ")"; break;
    case ExprKind::Cos: os << "cos(" << to_string(e->a, depth - 1) << ")"; break;
    case ExprKind::Sinh: os << "sinh(" << to_string(e->a, depth - 1) << ")"; break;
    case ExprKind::Cosh: os << "cosh(" << to_string(e->a, depth - 1) << ")"; break;
  }
  return os.str();
}

/// Reusable evaluation context. Values of shared sub-expressions are cached
/// per point, keyed by node id, so DAG evaluation is linear in the number of
/// unique nodes. One ExprEval per thread; the nodes themselves are immutable.
class ExprEval {
public:
  double operator()(const Expr& e, std::span<const double> x) {
    begin_point();
    return eval(e, x);
  }

  /// Evaluate several expressions at the same point with a shared cache;
  /// common sub-DAGs are computed once.
  void eval_batch(std::span<const Expr> es, std::span<const double> x, std::span<double> out) {
    begin_point();
    for (std::size_t k = 0; k < es.size(); ++k) out[k] = eval(es[k], x);
  }

private:
  static std::uint32_t current_max_id() {
    auto& u = detail::ExprUniverse::instance();
    std::scoped_lock lock(u.mu);
    return u.next_id;
  }

  double eval(const Expr& e, std::span<const double> x) {
    if (e->id < stamps_.size() && stamps_[e->id] == epoch_) return slots_[e->id];
    double v = 0.0;
    switch (e->kind) {
      case ExprKind::Constant: v = e->value; break;
      case ExprKind::Coordinate:
        if (e->coord < 0 || static_cast<std::size_t>(e->coord) >= x.size())
          throw EvalError("coordinate index out of range in " + to_string(e));
        v = x[static_cast<std::size_t>(e->coord)];
        break;
      case ExprKind::Add: v = eval(e->a, x) + eval(e->b, x); break;
      case ExprKind::Mul: v = eval(e->a, x) * eval(e->b, x); break;
      case ExprKind::Div: {
        const double den = eval(e->b, x);
        if (den == 0.0) throw EvalError("division by zero in " + to_string(e));
        v = eval(e->a, x) / den;
        break;
      }
      case ExprKind::Pow: {
        const double base = eval(e->a, x);
        const double p = e->exponent;
        const bool integral = p == std::rint(p);
        if (base == 0.0 && p < 0.0)
          throw EvalError("zero raised to negative power in " + to_string(e));
        if (base < 0.0 && !integral)
          throw EvalError("negative base with non-integer exponent in " + to_string(e));
        v = std::pow(base, p);
        break;
      }
      case ExprKind::Neg: v = -eval(e->a, x); break;
      case ExprKind::Exp: v = std::exp(eval(e->a, x)); break;
      case ExprKind::Log: {
        const double a = eval(e->a, x);
        if (a <= 0.0) throw EvalError("log of non-positive value in " + to_string(e));
        v = std::log(a);
        break;
      }
      case ExprKind::Sin: v = std::sin(eval(e->a, x)); break;
      case ExprKind::Cos: v = std::cos(eval(e->a, x)); break;
      case ExprKind::Sinh: v = std::sinh(eval(e->a, x)); break;
      case ExprKind::Cosh: v = std::cosh(eval(e->a, x)); break;
    }
    if (!std::isfinite(v))
      throw EvalError("non-finite value produced by " + to_string(e));
    if (e->id < stamps_.size()) {
      slots_[e->id] = v;
      stamps_[e->id] = epoch_;
    }
    return v;
  }

  std::vector<double> slots_;
  std::vector<std::uint32_t> stamps_;
  std::uint32_t epoch_ = 0;
};

/// One-shot evaluation; prefer a long-lived ExprEval in hot loops.
inline double evaluate(const Expr& e, std::span<const double> x) {
  ExprEval ev;
  return ev(e, x);
}

/// Exact partial derivative with respect to coordinate axis `i` (0-based).
/// Results are cached globally, so iterated operators reuse earlier work.
inline Expr differentiate(const Expr& e, int i) {
  auto& u = detail::ExprUniverse::instance();
  const std::uint64_t key =
      (static_cast<std::uint64_t>(e->id) << 16) | static_cast<std::uint64_t>(i & 0xffff);
  {
    std::scoped_lock lock(u.mu);
    auto it = u.derivatives.find(key);
    if (it != u.derivatives.end()) return it->second;
  }
  Expr d;
  switch (e->kind) {
    case ExprKind::Constant: d = constant(0.0); break;
    case ExprKind::Coordinate: d = constant(e->coord == i ? 1.0 : 0.0); break;
    case ExprKind::Add: d = add(differentiate(e->a, i), differentiate(e->b, i)); break;
    case ExprKind::Mul:
      d = add(mul(differentiate(e->a, i), e->b), mul(e->a, differentiate(e->b, i)));
      break;
    case ExprKind::Div:
      d = div(sub(mul(differentiate(e->a, i), e->b), mul(e->a, differentiate(e->b, i))),
              mul(e->b, e->b));
      break;
    case ExprKind::Pow:
      d = mul(mul(constant(e->exponent), pow_expr(e->a, e->exponent - 1.0)),
              differentiate(e->a, i));
      break;
    case ExprKind::Neg: d = neg(differentiate(e->a, i)); break;
    case ExprKind::Exp: d = mul(e, differentiate(e->a, i)); break;
    case ExprKind::Log: d = div(differentiate(e->a, i), e->a); break;
    case ExprKind::Sin: d = mul(cos_expr(e->a), differentiate(e->a, i)); break;
    case ExprKind::Cos: d = neg(mul(sin_expr(e->a), differentiate(e->a, i))); break;
    case ExprKind::Sinh: d = mul(cosh_expr(e->a), differentiate(e->a, i)); break;
    case ExprKind::Cosh: d = mul(sinh_expr(e->a), differentiate(e->a, i)); break;
  }
  std::scoped_lock lock(u.mu);
  u.derivatives.emplace(key, d);
  return d;
}

/// Replace Coordinate(i) by subs[i] (entries may be null to keep the
/// coordinate). Used to compose expressions, e.g. metric components pulled
/// back through a boundary parametrization.
inline Expr substitute(const Expr& e, const std::vector<Expr>& subs) {
  std::unordered_map<const ExprNode*, Expr> memo;
  auto rec = [&](auto&& self, const Expr& n) -> Expr {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    Expr r;
    switch (n->kind) {
      case ExprKind::Constant: r = n; break;
      case ExprKind::Coordinate:
        r = (n->coord >= 0 && static_cast<std::size_t>(n->coord) < subs.size() &&
             subs[static_cast<std::size_t>(n->coord)])
                ? subs[static_cast<std::size_t>(n->coord)]
                : n;
        break;
      case ExprKind::Add: r = add(self(self, n->a), self(self, n->b)); break;
      case ExprKind::Mul: r = mul(self(self, n->a), self(self, n->b)); break;
      case ExprKind::Div: r = div(self(self, n->a), self(self, n->b)); break;
      case ExprKind::Pow: r = pow_expr(self(self, n->a), n->exponent); break;
      case ExprKind::Neg: r = neg(self(self, n->a)); break;
      case ExprKind::Exp: r = exp_expr(self(self, n->a)); break;
      case ExprKind::Log: r = log_expr(self(self, n->a)); break;
      case ExprKind::Sin: r = sin_expr(self(self, n->a)); break;
      case ExprKind::Cos: r = cos_expr(self(self, n->a)); break;
      case ExprKind::Sinh: r = sinh_expr(self(self, n->a)); break;
      case ExprKind::Cosh: r = cosh_expr(self(self, n->a)); break;
    }
    memo.emplace(n.get(), r);
    return r;
  };
  return rec(rec, e);
}

/// Number of unique nodes reachable from `e` (DAG size, not tree size).
inline std::size_t node_count(const Expr& e) {
  std::unordered_set<const ExprNode*> seen;
  auto rec = [&](auto&& self, const Expr& n) -> void {
    if (!n || !seen.insert(n.get()).second) return;
    self(self, n->a);
    self(self, n->b);
  };
  rec(rec, e);
  return seen.size();
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

/// All partial derivatives of a scalar up to total order K at one point,
/// stored densely by multi-index (graded lexicographic order). Entries are
/// produced by the same differentiate/evaluate path used everywhere else.
class JetValue {
public:
  JetValue(int dim, int order) : dim_(dim), order_(order) {
    std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
    for (int total = 0; total <= order; ++total) emit(alpha, 0, total);
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<std::vector<int>>& indices() const { return indices_; }

  double at(std::span<const int> alpha) const {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      const auto& a = indices_[k];
      if (std::equal(a.begin(), a.end(), alpha.begin(), alpha.end())) return values_[k];
    }
    throw EvalError("jet: multi-index out of range");
  }

  double& value_at(std::size_t k) { return values_[k]; }
  double value_at(std::size_t k) const { return values_[k]; }

private:
  void emit(std::vector<int>& alpha, int pos, int remaining) {
    if (pos == dim_ - 1) {
      alpha[static_cast<std::size_t>(pos)] = remaining;
      indices_.push_back(alpha);
      values_.push_back(0.0);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      alpha[static_cast<std::size_t>(pos)] = k;
      emit(alpha, pos + 1, remaining - k);
    }
  }

  int dim_;
  int order_;
  std::vector<std::vector<int>> indices_;
  std::vector<double> values_;
};

/// Jet of `e` at `x`: every entry equals the corresponding nested
/// differentiate + evaluate result (identical code path).
inline JetValue jet(const Expr& e, std::span<const double> x, int K) {
  if (K < 0) throw PreconditionError("jet: order must be >= 0");
  const int n = static_cast<int>(x.size());
  JetValue j(n, K);
  ExprEval ev;
  const auto& idx = j.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    Expr d = e;
    for (int axis = 0; axis < n; ++axis)
      for (int rep = 0; rep < idx[k][static_cast<std::size_t>(axis)]; ++rep)
        d = differentiate(d, axis);
    j.value_at(k) = ev(d, x);
  }
  return j;
}

} // namespace rellich
