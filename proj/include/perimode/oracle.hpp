#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "perimode/operators.hpp"
#include "perimode/signal.hpp"
#include "perimode/types.hpp"

namespace perimode {

/// How the collocation oracle discretizes d^3/dt^3 on the periodic grid.
enum class D3Mode {
  spectral,  // trigonometric differentiation (exact on band-limited signals)
  fd2        // second-order central finite differences
};

/// N x N circulant matrix of third-derivative weights for the uniform grid
/// t_j = 2*pi*j/N.  Built from raw sums, independent of the DFT module.
///
/// spectral: first column c_j = (1/N) sum_{|k| <= (N-1)/2} (ik)^3 e^{ik t_j},
/// which is real because the symbol is odd in k.  For even N the Nyquist mode
/// is annihilated (its symbol is left at zero).
///
/// fd2: central stencil (-1/2, 1, 0, -1, 1/2)/h^3 over offsets -2..2 with
/// periodic wraparound, h = 2*pi/N.
inline Eigen::MatrixXd third_derivative_matrix(int N, D3Mode mode) {
  if (N < 5) throw std::invalid_argument("derivative matrix needs N >= 5");
  Eigen::MatrixXd d3 = Eigen::MatrixXd::Zero(N, N);
  if (mode == D3Mode::spectral) {
    const int kmax = (N - 1) / 2;
    std::vector<double> column(N);
    for (int j = 0; j < N; ++j) {
      const double t = kTwoPi * j / N;
      double sum = 0.0;
      // (ik)^3 e^{ikt} + (-ik)^3 e^{-ikt} = 2 k^3 sin(kt)
      for (int k = 1; k <= kmax; ++k)
        sum += 2.0 * static_cast<double>(k) * k * k * std::sin(k * t);
      column[j] = sum / N;
    }
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) d3(j, l) = column[(j - l + N) % N];
  } else {
    const double h = kTwoPi / N;
    const double inv_h3 = 1.0 / (h * h * h);
    const int offsets[4] = {-2, -1, 1, 2};
    const double weights[4] = {-0.5, 1.0, -1.0, 0.5};
    for (int j = 0; j < N; ++j)
      for (int s = 0; s < 4; ++s) d3(j, (j + offsets[s] + N) % N) += weights[s] * inv_h3;
  }
  return d3;
}

/// Stacked collocation system for z''' = Az + f on the N-point grid:
/// block row j reads sum_l D3(j,l) z_l - A z_j = f_j, unknowns stacked as
/// (z_0, ..., z_{N-1}) in R^{N*d}.
struct CollocationSystem {
  int N = 0;
  int d = 0;
  Mat matrix;
};

inline constexpr int kCollocationCap = 4096;  // largest allowed N*d

inline CollocationSystem build_collocation(const LinearOperatorHandle& A, int N,
                                           D3Mode mode) {
  const int d = A.dim();
  if (N * d > kCollocationCap)
    throw std::invalid_argument("collocation system too large: N*d must be <= 4096");
  const Eigen::MatrixXd d3 = third_derivative_matrix(N, mode);
  const Mat a_dense = A.dense_matrix();

  CollocationSystem sys;
  sys.N = N;
  sys.d = d;
  sys.matrix = Mat::Zero(N * d, N * d);
  for (int j = 0; j < N; ++j) {
    for (int l = 0; l < N; ++l) {
      if (d3(j, l) != 0.0)
        sys.matrix.block(j * d, l * d, d, d) =
            d3(j, l) * Mat::Identity(d, d);
    }
    sys.matrix.block(j * d, j * d, d, d) -= a_dense;
  }
  return sys;
}

/// Solves the collocation system directly (dense LU on the stacked matrix).
/// Entirely independent of the per-mode spectral solver: no DFT, no resolvent.
inline PeriodicSignal collocation_solve(const LinearOperatorHandle& A,
                                        const PeriodicSignal& f, D3Mode mode) {
  if (A.dim() != f.dim())
    throw DimensionError("operator and forcing dimensions differ");
  const CollocationSystem sys = build_collocation(A, f.size(), mode);

  Vec stacked(sys.N * sys.d);
  for (int j = 0; j < sys.N; ++j) stacked.segment(j * sys.d, sys.d) = f.sample(j);

  const Eigen::PartialPivLU<Mat> lu(sys.matrix);
  const Vec solution = lu.solve(stacked);

  PeriodicSignal z = PeriodicSignal::zeros(sys.d, sys.N);
  for (int j = 0; j < sys.N; ++j)
    z.values().col(j) = solution.segment(j * sys.d, sys.d);
  return z;
}

/// Exact Rademacher p-th moments by full sign enumeration (2^n patterns):
/// numerator   (E |sum_j r_j T_j x_j|^p)^{1/p},
/// denominator (E |sum_j r_j x_j|^p)^{1/p},
/// and their ratio.  Reference oracle for the sampling estimators.
struct RademacherMoments {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  double p = 2.0;
  std::uint64_t patterns = 0;
};

inline RademacherMoments exhaustive_rademacher(const std::vector<Mat>& family,
                                               const std::vector<Vec>& probes,
                                               double p) {
  if (family.empty()) throw std::invalid_argument("family must be non-empty");
  if (family.size() != probes.size())
    throw DimensionError("probe set must match family size");
  if (family.size() > 12)
    throw FamilyTooLargeError("exhaustive enumeration capped at 12 members");
  if (p <= 0.0) throw std::invalid_argument("moment order must be positive");

  const int n = static_cast<int>(family.size());
  const int d = static_cast<int>(family[0].rows());
  for (int j = 0; j < n; ++j)
    if (family[j].rows() != d || family[j].cols() != d || probes[j].size() != d)
      throw DimensionError("family and probes must share one dimension");

  std::vector<Vec> mapped(n);
  for (int j = 0; j < n; ++j) mapped[j] = family[j] * probes[j];

  RademacherMoments result;
  result.p = p;
  result.patterns = std::uint64_t{1} << n;

  double num = 0.0, den = 0.0;
  Vec s(d), t(d);
  for (std::uint64_t mask = 0; mask < result.patterns; ++mask) {
    s.setZero();
    t.setZero();
    for (int j = 0; j < n; ++j) {
      const double sign = (mask >> j) & 1 ? -1.0 : 1.0;
      s += sign * mapped[j];
      t += sign * probes[j];
    }
    num += std::pow(s.norm(), p);
    den += std::pow(t.norm(), p);
  }
  num /= static_cast<double>(result.patterns);
  den /= static_cast<double>(result.patterns);
  if (den == 0.0) throw std::invalid_argument("probes must not all be zero");

  result.numerator = std::pow(num, 1.0 / p);
  result.denominator = std::pow(den, 1.0 / p);
  result.ratio = result.numerator / result.denominator;
  return result;
}

}  // namespace perimode
