#pragma once

#include <utility>
#include <vector>

#include "rellich/geometry.hpp"

namespace rellich {

enum class Slot : std::uint8_t { Up, Down };

/// Symbolic tensor field on a chart: n^rank expression components plus the
/// variance of each index slot. Covariant derivatives prepend a Down slot.
class TensorExpr {
public:
  TensorExpr(const ChartMetric* g, std::vector<Slot> slots, std::vector<Expr> comps)
      : g_(g), slots_(std::move(slots)), comps_(std::move(comps)) {
    std::size_t expect = 1;
    for (std::size_t r = 0; r < slots_.size(); ++r) expect *= static_cast<std::size_t>(g_->dim());
    if (comps_.size() != expect) throw PreconditionError("tensor: wrong component count");
  }

  static TensorExpr scalar(const ChartMetric* g, Expr e) {
    return TensorExpr(g, {}, {std::move(e)});
  }
  static TensorExpr vector_up(const ChartMetric* g, std::vector<Expr> comps) {
    return TensorExpr(g, {Slot::Up}, std::move(comps));
  }
  static TensorExpr covector(const ChartMetric* g, std::vector<Expr> comps) {
    return TensorExpr(g, {Slot::Down}, std::move(comps));
  }

  const ChartMetric& metric() const { return *g_; }
  int dim() const { return g_->dim(); }
  int rank() const { return static_cast<int>(slots_.size()); }
  Slot slot(int k) const { return slots_[static_cast<std::size_t>(k)]; }
  const std::vector<Expr>& components() const { return comps_; }

  const Expr& at(std::span<const int> idx) const { return comps_[flat(idx)]; }
  const Expr& at(std::initializer_list<int> idx) const {
    return comps_[flat(std::span<const int>(idx.begin(), idx.size()))];
  }
  const Expr& value() const { return comps_[0]; } // rank 0

  /// nabla_a T: new first slot is the (Down) derivative index.
  TensorExpr cov_derivative() const {
    const int n = dim();
    const int r = rank();
    std::vector<Slot> slots;
    slots.reserve(static_cast<std::size_t>(r) + 1);
    slots.push_back(Slot::Down);
    slots.insert(slots.end(), slots_.begin(), slots_.end());

    std::vector<Expr> out(comps_.size() * static_cast<std::size_t>(n));
    std::vector<int> idx(static_cast<std::size_t>(r), 0);
    const std::size_t count = comps_.size();
    for (std::size_t flat_in = 0; flat_in < count; ++flat_in) {
      unflatten(flat_in, idx);
      for (int a = 0; a < n; ++a) {
        Expr term = differentiate(comps_[flat_in], a);
        for (int t = 0; t < r; ++t) {
          std::vector<int> jdx(idx);
          const int orig = idx[static_cast<std::size_t>(t)];
          for (int s = 0; s < n; ++s) {
            jdx[static_cast<std::size_t>(t)] = s;
            const Expr& comp = comps_[flat(std::span<const int>(jdx))];
            if (slots_[static_cast<std::size_t>(t)] == Slot::Up)
              term = add(term, mul(g_->christoffel(orig, a, s), comp));
            else
              term = sub(term, mul(g_->christoffel(s, a, orig), comp));
          }
        }
        out[static_cast<std::size_t>(a) * count + flat_in] = term;
      }
    }
    return TensorExpr(g_, std::move(slots), std::move(out));
  }

  TensorExpr raise(int slot) const { return flip(slot, Slot::Down, true); }
  TensorExpr lower(int slot) const { return flip(slot, Slot::Up, false); }

  /// Contract one Up slot against one Down slot.
  TensorExpr contract(int sa, int sb) const {
    if (sa > sb) std::swap(sa, sb);
    if (slots_[static_cast<std::size_t>(sa)] == slots_[static_cast<std::size_t>(sb)])
      throw PreconditionError("tensor contraction needs one Up and one Down slot");
    const int n = dim();
    const int r = rank();
    std::vector<Slot> slots;
    for (int t = 0; t < r; ++t)
      if (t != sa && t != sb) slots.push_back(slots_[static_cast<std::size_t>(t)]);

    std::size_t out_count = 1;
    for (std::size_t t = 0; t < slots.size(); ++t) out_count *= static_cast<std::size_t>(n);
    std::vector<Expr> out(out_count);
    std::vector<int> oidx(slots.size(), 0), idx(static_cast<std::size_t>(r), 0);
    for (std::size_t fo = 0; fo < out_count; ++fo) {
      unflatten_generic(fo, oidx, n);
      Expr sum = constant(0.0);
      for (int s = 0; s < n; ++s) {
        int w = 0;
        for (int t = 0; t < r; ++t) {
          if (t == sa || t == sb) idx[static_cast<std::size_t>(t)] = s;
          else idx[static_cast<std::size_t>(t)] = oidx[static_cast<std::size_t>(w++)];
        }
        sum = add(sum, comps_[flat(std::span<const int>(idx))]);
      }
      out[fo] = sum;
    }
    return TensorExpr(g_, std::move(slots), std::move(out));
  }

  TensorExpr operator+(const TensorExpr& o) const {
    std::vector<Expr> out(comps_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = add(comps_[k], o.comps_[k]);
    return TensorExpr(g_, slots_, std::move(out));
  }

  TensorExpr operator-(const TensorExpr& o) const {
    std::vector<Expr> out(comps_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = sub(comps_[k], o.comps_[k]);
    return TensorExpr(g_, slots_, std::move(out));
  }

  TensorExpr scaled(const Expr& c) const {
    std::vector<Expr> out(comps_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = mul(c, comps_[k]);
    return TensorExpr(g_, slots_, std::move(out));
  }

  /// Reorder slots: new slot k takes the old slot perm[k].
  TensorExpr permute(const std::vector<int>& perm) const {
    const int n = dim();
    const int r = rank();
    std::vector<Slot> slots(static_cast<std::size_t>(r));
    for (int k = 0; k < r; ++k)
      slots[static_cast<std::size_t>(k)] = slots_[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    std::vector<Expr> out(comps_.size());
    std::vector<int> oidx(static_cast<std::size_t>(r), 0), idx(static_cast<std::size_t>(r), 0);
    for (std::size_t fo = 0; fo < out.size(); ++fo) {
      unflatten_generic(fo, oidx, n);
      for (int k = 0; k < r; ++k)
        idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = oidx[static_cast<std::size_t>(k)];
      out[fo] = comps_[flat(std::span<const int>(idx))];
    }
    return TensorExpr(g_, std::move(slots), std::move(out));
  }

private:
  TensorExpr flip(int slot, Slot expect, bool use_inverse) const {
    if (slots_[static_cast<std::size_t>(slot)] != expect)
      throw PreconditionError("tensor raise/lower: slot has wrong variance");
    const int n = dim();
    std::vector<Slot> slots(slots_);
    slots[static_cast<std::size_t>(slot)] = use_inverse ? Slot::Up : Slot::Down;
    std::vector<Expr> out(comps_.size());
    std::vector<int> idx(static_cast<std::size_t>(rank()), 0);
    for (std::size_t fo = 0; fo < out.size(); ++fo) {
      unflatten(fo, idx);
      const int target = idx[static_cast<std::size_t>(slot)];
      Expr sum = constant(0.0);
      for (int s = 0; s < n; ++s) {
        idx[static_cast<std::size_t>(slot)] = s;
        const Expr& gc = use_inverse ? g_->ginv(target, s) : g_->g(target, s);
        sum = add(sum, mul(gc, comps_[flat(std::span<const int>(idx))]));
      }
      idx[static_cast<std::size_t>(slot)] = target;
      out[fo] = sum;
    }
    return TensorExpr(g_, std::move(slots), std::move(out));
  }

  std::size_t flat(std::span<const int> idx) const {
    std::size_t f = 0;
    for (std::size_t t = 0; t < idx.size(); ++t)
      f = f * static_cast<std::size_t>(dim()) + static_cast<std::size_t>(idx[t]);
    return f;
  }

  void unflatten(std::size_t f, std::vector<int>& idx) const {
    unflatten_generic(f, idx, dim());
  }

  static void unflatten_generic(std::size_t f, std::vector<int>& idx, int n) {
    for (std::size_t t = idx.size(); t-- > 0;) {
      idx[t] = static_cast<int>(f % static_cast<std::size_t>(n));
      f /= static_cast<std::size_t>(n);
    }
  }

  const ChartMetric* g_;
  std::vector<Slot> slots_;
  std::vector<Expr> comps_;
};

} // namespace rellich
