#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "perimode/types.hpp"

namespace perimode {

/// Deterministic random source used by every randomized component.
///
/// mt19937_64 output is fixed by the standard and the Gaussian transform is
/// spelled out here, so a seed reproduces the same stream on any platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  /// Complex standard normal, E|z|^2 = 1.
  Complex complex_normal() {
    constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    return Complex(normal() * inv_sqrt2, normal() * inv_sqrt2);
  }

  /// Gaussian complex vector normalized to unit Euclidean norm.
  Vec unit_vector(int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex(normal(), normal());
    const double n = v.norm();
    if (n == 0.0) {
      v.setZero();
      v[0] = 1.0;
      return v;
    }
    return v / n;
  }

  /// Uniform integer in [lo, hi] by rejection, bias-free.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(0, i)]);
    return p;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace perimode
