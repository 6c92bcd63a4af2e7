#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace rellich {

/// Deterministic 64-bit linear congruential generator with Knuth's MMIX
/// constants:
///   state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
/// Doubles are produced from the top 53 bits: (state >> 11) * 2^-53.
/// Identical seeds give identical streams on every platform.
class Lcg64 {
public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
  std::uint64_t state_;
};

using Point = std::vector<double>;

inline Point random_point_in_box(Lcg64& rng, const Point& lo, const Point& hi) {
  Point x(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) x[i] = rng.uniform(lo[i], hi[i]);
  return x;
}

/// Rejection sampling from the enclosing cube; deterministic for a fixed seed.
inline Point random_point_in_ball(Lcg64& rng, const Point& center, double radius) {
  const std::size_t n = center.size();
  Point x(n);
  for (;;) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-1.0, 1.0);
      r2 += x[i] * x[i];
    }
    if (r2 <= 1.0) break;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = center[i] + radius * x[i];
  return x;
}

inline Point random_point_on_sphere(Lcg64& rng, const Point& center, double radius) {
  const std::size_t n = center.size();
  Point x(n);
  for (;;) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(-1.0, 1.0);
      r2 += x[i] * x[i];
    }
    if (r2 > 1e-8 && r2 <= 1.0) {
      const double s = radius / std::sqrt(r2);
      for (std::size_t i = 0; i < n; ++i) x[i] = center[i] + s * x[i];
      return x;
    }
  }
}

} // namespace rellich
