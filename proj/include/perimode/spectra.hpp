#pragma once

#include <cmath>
#include <vector>

#include "perimode/signal.hpp"
#include "perimode/types.hpp"

namespace perimode {

enum class DerivativeOrder : int { first = 1, second = 2, third = 3 };

namespace detail {

/// N-th roots of unity e^{-2*pi*i*m/N}, m = 0..N-1.
inline std::vector<Complex> forward_twiddles(int samples) {
  std::vector<Complex> w(samples);
  for (int m = 0; m < samples; ++m) {
    const double angle = -kTwoPi * m / samples;
    w[m] = Complex(std::cos(angle), std::sin(angle));
  }
  return w;
}

/// (k*j) mod N folded into [0, N), valid for negative k.
inline int mode_index(long long k, long long j, int samples) {
  const long long m = (k * j) % samples;
  return static_cast<int>(m < 0 ? m + samples : m);
}

}  // namespace detail

/// Forward transform: coeff(k) = (1/N) sum_j e^{-ik t_j} f(t_j) for |k| <= K.
///
/// The uniform rectangle rule is exact (to rounding) on trigonometric
/// polynomials of degree <= K as long as the window is unaliased, 2K+1 <= N.
inline SpectralCoefficients dft(const PeriodicSignal& f, int truncation) {
  const int N = f.size();
  if (truncation < 0) throw WindowError("truncation order must be non-negative");
  if (2 * truncation + 1 > N)
    throw WindowError("coefficient window too wide: 2K+1 > N");

  const auto w = detail::forward_twiddles(N);
  SpectralCoefficients c = SpectralCoefficients::zeros(f.dim(), truncation);
  for (int k = -truncation; k <= truncation; ++k) {
    Vec acc = Vec::Zero(f.dim());
    for (int j = 0; j < N; ++j)
      acc += w[detail::mode_index(k, j, N)] * f.values().col(j);
    c.set_coeff(k, acc / static_cast<double>(N));
  }
  return c;
}

/// Default truncation floor((N-1)/2), the widest unaliased window.
inline SpectralCoefficients dft(const PeriodicSignal& f) {
  return dft(f, (f.size() - 1) / 2);
}

/// Partial Fourier sum on the uniform grid: sample j = sum_k e^{ik t_j} coeff(k).
inline PeriodicSignal synthesize(const SpectralCoefficients& c, int samples) {
  const int K = c.truncation();
  if (samples < 2 * K + 1)
    throw WindowError("sample count too small: N < 2K+1");

  const auto w = detail::forward_twiddles(samples);
  Mat values = Mat::Zero(c.dim(), samples);
  for (int j = 0; j < samples; ++j) {
    Vec acc = Vec::Zero(c.dim());
    for (int k = -K; k <= K; ++k)
      acc += std::conj(w[detail::mode_index(k, j, samples)]) * c.coeff(k);
    values.col(j) = acc;
  }
  return PeriodicSignal(std::move(values));
}

/// Cesaro mean of partial sums, evaluated as the single weighted sum
/// sum_{|k|<=n} (1 - |k|/(n+1)) e^{ikt} coeff(k).
inline PeriodicSignal fejer_sum(const SpectralCoefficients& c, int order, int samples) {
  const int K = c.truncation();
  if (order < 0) throw WindowError("Cesaro order must be non-negative");
  if (order > K) throw WindowError("Cesaro order exceeds truncation: n > K");
  if (samples < 2 * K + 1)
    throw WindowError("sample count too small: N < 2K+1");

  SpectralCoefficients weighted = SpectralCoefficients::zeros(c.dim(), order);
  for (int k = -order; k <= order; ++k) {
    const double weight = 1.0 - static_cast<double>(std::abs(k)) / (order + 1);
    weighted.set_coeff(k, weight * c.coeff(k));
  }
  return synthesize(weighted, samples);
}

/// Multiply coeff(k) by (ik)^m.  Orders 1..3 carry the symbols ik, -k^2 and
/// -ik^3 used by the periodic Sobolev scales.
inline SpectralCoefficients spectral_derivative(const SpectralCoefficients& c,
                                                DerivativeOrder order) {
  const int K = c.truncation();
  SpectralCoefficients out = c;
  for (int k = -K; k <= K; ++k) {
    Complex symbol;
    switch (order) {
      case DerivativeOrder::first:
        symbol = Complex(0.0, k);
        break;
      case DerivativeOrder::second:
        symbol = Complex(-static_cast<double>(k) * k, 0.0);
        break;
      case DerivativeOrder::third:
        symbol = Complex(0.0, -static_cast<double>(k) * k * k);
        break;
    }
    out.set_coeff(k, symbol * c.coeff(k));
  }
  return out;
}

}  // namespace perimode
