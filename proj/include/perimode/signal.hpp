#pragma once

#include <utility>

#include "perimode/types.hpp"

namespace perimode {

/// Uniformly sampled 2*pi-periodic function with values in C^d.
///
/// Column j holds the value at t_j = 2*pi*j/N; t = 2*pi is identified with
/// t = 0, so there is no duplicate endpoint sample.
class PeriodicSignal {
 public:
  explicit PeriodicSignal(Mat values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      throw DimensionError("PeriodicSignal needs d >= 1 and N >= 1");
  }

  static PeriodicSignal zeros(int dim, int samples) {
    return PeriodicSignal(Mat::Zero(dim, samples));
  }

  int dim() const { return static_cast<int>(values_.rows()); }
  int size() const { return static_cast<int>(values_.cols()); }

  double grid_point(int j) const { return kTwoPi * j / size(); }

  Vec sample(int j) const { return values_.col(j); }
  const Mat& values() const { return values_; }
  Mat& values() { return values_; }

  /// Largest sample norm over the grid.
  double sup_norm() const { return values_.colwise().norm().maxCoeff(); }

  /// Discrete L2 norm, sqrt((1/N) sum_j |f(t_j)|^2).
  double l2_norm() const { return values_.norm() / std::sqrt(static_cast<double>(size())); }

  bool is_real(double tol = 0.0) const {
    return values_.imag().cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Mat values_;
};

/// Complex Fourier coefficients on the symmetric mode window [-K, K].
///
/// Column k+K holds the coefficient of e^{ikt}; there are exactly 2K+1
/// contiguous entries.
class SpectralCoefficients {
 public:
  SpectralCoefficients(int truncation, Mat coeffs)
      : K_(truncation), coeffs_(std::move(coeffs)) {
    if (K_ < 0) throw WindowError("truncation order must be non-negative");
    if (coeffs_.cols() != 2 * K_ + 1)
      throw DimensionError("coefficient matrix must have 2K+1 columns");
    if (coeffs_.rows() < 1) throw DimensionError("state dimension must be >= 1");
  }

  static SpectralCoefficients zeros(int dim, int truncation) {
    return SpectralCoefficients(truncation, Mat::Zero(dim, 2 * truncation + 1));
  }

  int truncation() const { return K_; }
  int dim() const { return static_cast<int>(coeffs_.rows()); }

  Vec coeff(int k) const {
    check_mode(k);
    return coeffs_.col(k + K_);
  }

  void set_coeff(int k, const Vec& value) {
    check_mode(k);
    if (value.size() != coeffs_.rows()) throw DimensionError("coefficient dimension mismatch");
    coeffs_.col(k + K_) = value;
  }

  const Mat& matrix() const { return coeffs_; }
  Mat& matrix() { return coeffs_; }

  /// sqrt(sum_k |c_k|^2), the Parseval-side energy.
  double l2_norm() const { return coeffs_.norm(); }

 private:
  void check_mode(int k) const {
    if (k < -K_ || k > K_) throw WindowError("mode index outside [-K, K]");
  }

  int K_;
  Mat coeffs_;
};

}  // namespace perimode
