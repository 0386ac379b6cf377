#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "perimode/types.hpp"

namespace perimode {

enum class OperatorKind { dense, tridiagonal, diagonal, scalar };

inline const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::dense: return "dense";
    case OperatorKind::tridiagonal: return "tridiagonal";
    case OperatorKind::diagonal: return "diagonal";
    case OperatorKind::scalar: return "scalar";
  }
  return "unknown";
}

/// Relative singularity tolerance for shifted solves: lambda*I - A is treated
/// as singular when its smallest singular value is <= this factor times
/// (|lambda| + an infinity-norm scale of A).
inline constexpr double kSingularShiftTol = 1e-10;

/// Finite-dimensional realization of the closed operator A.
///
/// A handle is immutable after construction and cheap to copy; concurrent
/// shifted solves are safe, and factorizations at a fixed shift are cached
/// and shared across right-hand sides.
class LinearOperatorHandle {
 public:
  static LinearOperatorHandle dense(Mat matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
      throw DimensionError("dense operator must be square, dim >= 1");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::dense;
    impl->dim = static_cast<int>(matrix.rows());
    impl->matrix = std::move(matrix);
    impl->norm_scale = impl->matrix.cwiseAbs().rowwise().sum().maxCoeff();
    return LinearOperatorHandle(std::move(impl));
  }

  static LinearOperatorHandle diagonal(Vec entries) {
    if (entries.size() < 1) throw DimensionError("diagonal operator needs entries");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::diagonal;
    impl->dim = static_cast<int>(entries.size());
    impl->diag = std::move(entries);
    impl->norm_scale = impl->diag.cwiseAbs().maxCoeff();
    return LinearOperatorHandle(std::move(impl));
  }

  static LinearOperatorHandle scalar(Complex value) {
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::scalar;
    impl->dim = 1;
    impl->diag = Vec::Constant(1, value);
    impl->norm_scale = std::abs(value);
    return LinearOperatorHandle(std::move(impl));
  }

  /// Bands are (sub, diag, super) with sizes (n-1, n, n-1).
  static LinearOperatorHandle tridiagonal(Vec sub, Vec diag, Vec super) {
    const int n = static_cast<int>(diag.size());
    if (n < 1) throw DimensionError("tridiagonal operator needs a diagonal");
    if (sub.size() != n - 1 || super.size() != n - 1)
      throw DimensionError("tridiagonal bands must have length n-1");
    auto impl = std::make_shared<Impl>();
    impl->kind = OperatorKind::tridiagonal;
    impl->dim = n;
    impl->diag = std::move(diag);
    impl->sub = std::move(sub);
    impl->super = std::move(super);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = std::abs(impl->diag[i]);
      if (i > 0) row += std::abs(impl->sub[i - 1]);
      if (i < n - 1) row += std::abs(impl->super[i]);
      scale = std::max(scale, row);
    }
    impl->norm_scale = scale;
    return LinearOperatorHandle(std::move(impl));
  }

  OperatorKind kind() const { return impl_->kind; }
  int dim() const { return impl_->dim; }

  /// Infinity-norm scale used in singularity tolerances.
  double norm_scale() const { return impl_->norm_scale; }

  Vec apply(const Vec& x) const {
    if (x.size() != impl_->dim) throw DimensionError("apply: dimension mismatch");
    switch (impl_->kind) {
      case OperatorKind::scalar:
        return impl_->diag[0] * x;
      case OperatorKind::diagonal:
        return impl_->diag.cwiseProduct(x);
      case OperatorKind::tridiagonal: {
        const int n = impl_->dim;
        Vec y(n);
        for (int i = 0; i < n; ++i) {
          Complex acc = impl_->diag[i] * x[i];
          if (i > 0) acc += impl_->sub[i - 1] * x[i - 1];
          if (i < n - 1) acc += impl_->super[i] * x[i + 1];
          y[i] = acc;
        }
        return y;
      }
      case OperatorKind::dense:
        return impl_->matrix * x;
    }
    throw UnsupportedKindError("apply: unknown operator kind");
  }

  /// Solves (lambda*I - A) x = b.  Throws SingularShiftError when the shifted
  /// operator is singular at the relative tolerance kSingularShiftTol.
  Vec shifted_solve(Complex lambda, const Vec& b) const {
    if (b.size() != impl_->dim) throw DimensionError("shifted_solve: dimension mismatch");
    switch (impl_->kind) {
      case OperatorKind::scalar:
      case OperatorKind::diagonal: {
        const Vec shifted = ((-impl_->diag).array() + lambda).matrix();
        require_nonsingular(lambda, shifted.cwiseAbs().minCoeff());
        return b.cwiseQuotient(shifted);
      }
      case OperatorKind::tridiagonal:
      case OperatorKind::dense: {
        auto fact = factorization(lambda);
        require_nonsingular(lambda, fact->sigma_min);
        return fact->solve(b);
      }
    }
    throw UnsupportedKindError("shifted_solve: unknown operator kind");
  }

  /// Multi-right-hand-side variant sharing one factorization.
  Mat shifted_solve(Complex lambda, const Mat& rhs) const {
    if (rhs.rows() != impl_->dim) throw DimensionError("shifted_solve: dimension mismatch");
    Mat x(rhs.rows(), rhs.cols());
    switch (impl_->kind) {
      case OperatorKind::scalar:
      case OperatorKind::diagonal: {
        const Vec shifted = ((-impl_->diag).array() + lambda).matrix();
        require_nonsingular(lambda, shifted.cwiseAbs().minCoeff());
        for (Eigen::Index c = 0; c < rhs.cols(); ++c)
          x.col(c) = rhs.col(c).cwiseQuotient(shifted);
        return x;
      }
      default: {
        auto fact = factorization(lambda);
        require_nonsingular(lambda, fact->sigma_min);
        for (Eigen::Index c = 0; c < rhs.cols(); ++c) x.col(c) = fact->solve(rhs.col(c));
        return x;
      }
    }
  }

  /// Smallest singular value of lambda*I - A.
  double shift_margin(Complex lambda) const {
    switch (impl_->kind) {
      case OperatorKind::scalar:
      case OperatorKind::diagonal:
        return ((-impl_->diag).array() + lambda).matrix().cwiseAbs().minCoeff();
      default:
        return factorization(lambda)->sigma_min;
    }
  }

  bool shift_is_singular(Complex lambda) const {
    return shift_margin(lambda) <= singular_tolerance(lambda);
  }

  double singular_tolerance(Complex lambda) const {
    return kSingularShiftTol * (std::abs(lambda) + impl_->norm_scale);
  }

  /// Explicit dense embedding (used by oracles, spectra and tests).
  Mat dense_matrix() const {
    switch (impl_->kind) {
      case OperatorKind::dense:
        return impl_->matrix;
      case OperatorKind::scalar:
      case OperatorKind::diagonal:
        return impl_->diag.asDiagonal();
      case OperatorKind::tridiagonal: {
        const int n = impl_->dim;
        Mat m = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
          m(i, i) = impl_->diag[i];
          if (i > 0) m(i, i - 1) = impl_->sub[i - 1];
          if (i < n - 1) m(i, i + 1) = impl_->super[i];
        }
        return m;
      }
    }
    throw UnsupportedKindError("dense_matrix: unknown operator kind");
  }

  /// Largest singular value of the dense embedding.
  double operator_norm() const {
    std::call_once(impl_->norm2_once, [this] {
      Eigen::JacobiSVD<Mat> svd(dense_matrix());
      impl_->norm2 = svd.singularValues()[0];
    });
    return impl_->norm2;
  }

 private:
  /// LU data for one shift; lives in the per-handle cache keyed by lambda.
  struct ShiftFactorization {
    double sigma_min = 0.0;
    bool singular = false;

    // dense
    Eigen::PartialPivLU<Mat> lu;
    bool use_lu = false;

    // tridiagonal, LAPACK gttrf layout
    Vec dl, d, du, du2;
    std::vector<int> ipiv;

    Vec solve(const Vec& b) const {
      if (use_lu) return lu.solve(b);
      const int n = static_cast<int>(d.size());
      Vec x = b;
      for (int i = 0; i < n - 1; ++i) {
        if (ipiv[i] == i) {
          x[i + 1] -= dl[i] * x[i];
        } else {
          const Complex tmp = x[i];
          x[i] = x[i + 1];
          x[i + 1] = tmp - dl[i] * x[i];
        }
      }
      x[n - 1] /= d[n - 1];
      if (n > 1) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
      for (int i = n - 3; i >= 0; --i)
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
      return x;
    }
  };

  struct Impl {
    OperatorKind kind = OperatorKind::scalar;
    int dim = 0;
    double norm_scale = 0.0;
    Mat matrix;             // dense
    Vec diag, sub, super;   // scalar/diagonal/tridiagonal

    mutable std::once_flag norm2_once;
    mutable double norm2 = 0.0;

    mutable std::mutex cache_mutex;
    mutable std::map<std::pair<double, double>,
                     std::shared_ptr<const ShiftFactorization>>
        cache;
  };

  explicit LinearOperatorHandle(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

  void require_nonsingular(Complex lambda, double sigma_min) const {
    if (sigma_min <= singular_tolerance(lambda))
      throw SingularShiftError(lambda, sigma_min);
  }

  std::shared_ptr<const ShiftFactorization> factorization(Complex lambda) const {
    const std::pair<double, double> key(lambda.real(), lambda.imag());
    {
      std::lock_guard<std::mutex> lock(impl_->cache_mutex);
      auto it = impl_->cache.find(key);
      if (it != impl_->cache.end()) return it->second;
    }
    auto fact = std::make_shared<ShiftFactorization>(build_factorization(lambda));
    std::lock_guard<std::mutex> lock(impl_->cache_mutex);
    // Idempotent insert: first writer wins, later identical results are dropped.
    auto [it, inserted] = impl_->cache.emplace(key, std::move(fact));
    return it->second;
  }

  ShiftFactorization build_factorization(Complex lambda) const {
    ShiftFactorization f;
    const Mat shifted = lambda * Mat::Identity(impl_->dim, impl_->dim) - dense_matrix();
    {
      Eigen::JacobiSVD<Mat> svd(shifted);
      f.sigma_min = svd.singularValues()[svd.singularValues().size() - 1];
    }
    f.singular = f.sigma_min <= singular_tolerance(lambda);
    if (f.singular) return f;

    if (impl_->kind == OperatorKind::tridiagonal) {
      const int n = impl_->dim;
      f.d = Vec(n);
      f.dl = Vec(std::max(n - 1, 0));
      f.du = Vec(std::max(n - 1, 0));
      f.du2 = Vec(std::max(n - 2, 0));
      f.ipiv.assign(n, 0);
      for (int i = 0; i < n; ++i) f.d[i] = lambda - impl_->diag[i];
      for (int i = 0; i < n - 1; ++i) {
        f.dl[i] = -impl_->sub[i];
        f.du[i] = -impl_->super[i];
      }
      // gttrf-style LU with partial pivoting; fill-in goes to du2.
      for (int i = 0; i < n - 1; ++i) {
        if (std::abs(f.d[i]) >= std::abs(f.dl[i])) {
          f.ipiv[i] = i;
          if (f.d[i] != Complex(0.0, 0.0)) {
            const Complex mult = f.dl[i] / f.d[i];
            f.dl[i] = mult;
            f.d[i + 1] -= mult * f.du[i];
          }
          if (i < n - 2) f.du2[i] = Complex(0.0, 0.0);
        } else {
          f.ipiv[i] = i + 1;
          const Complex mult = f.d[i] / f.dl[i];
          f.d[i] = f.dl[i];
          f.dl[i] = mult;
          const Complex tmp = f.du[i];
          f.du[i] = f.d[i + 1];
          f.d[i + 1] = tmp - mult * f.d[i + 1];
          if (i < n - 2) {
            f.du2[i] = f.du[i + 1];
            f.du[i + 1] = -mult * f.du[i + 1];
          }
        }
      }
      if (n > 0) f.ipiv[n - 1] = n - 1;
    } else {
      f.lu = Eigen::PartialPivLU<Mat>(shifted);
      f.use_lu = true;
    }
    return f;
  }

  std::shared_ptr<Impl> impl_;
};

/// Second-difference Dirichlet Laplacian on (0, pi) with n interior points:
/// tridiagonal (1, -2, 1)/h^2, h = pi/(n+1).  Symmetric negative definite.
inline LinearOperatorHandle dirichlet_laplacian(int n) {
  if (n < 1) throw DimensionError("dirichlet_laplacian: n >= 1 required");
  const double h = kPi / (n + 1);
  const double w = 1.0 / (h * h);
  Vec diag = Vec::Constant(n, Complex(-2.0 * w, 0.0));
  Vec off = Vec::Constant(std::max(n - 1, 0), Complex(w, 0.0));
  return LinearOperatorHandle::tridiagonal(off, std::move(diag), off);
}

struct SpectrumReport {
  std::vector<Complex> eigenvalues;
  std::string method;
  double max_residual = 0.0;  // max |A v - mu v| / |v| over computed pairs
};

/// Full eigenvalue set of a matrix-backed handle, with a residual certificate
/// when eigenvectors are available.  Values are sorted by (re, im).
inline SpectrumReport spectrum(const LinearOperatorHandle& A) {
  SpectrumReport report;
  const int n = A.dim();
  switch (A.kind()) {
    case OperatorKind::scalar:
    case OperatorKind::diagonal: {
      const Mat m = A.dense_matrix();
      for (int i = 0; i < n; ++i) report.eigenvalues.push_back(m(i, i));
      report.method = "direct";
      break;
    }
    default: {
      const Mat m = A.dense_matrix();
      const bool hermitian = m.isApprox(m.adjoint(), 1e-14);
      if (hermitian) {
        Eigen::SelfAdjointEigenSolver<Mat> es(m);
        if (es.info() != Eigen::Success)
          throw std::runtime_error("spectrum: self-adjoint eigensolver failed");
        for (int i = 0; i < n; ++i) {
          const Complex mu(es.eigenvalues()[i], 0.0);
          report.eigenvalues.push_back(mu);
          const Vec v = es.eigenvectors().col(i);
          report.max_residual =
              std::max(report.max_residual, (m * v - mu * v).norm() / v.norm());
        }
        report.method = "self-adjoint";
      } else {
        Eigen::ComplexEigenSolver<Mat> es(m);
        if (es.info() != Eigen::Success)
          throw std::runtime_error("spectrum: eigensolver failed");
        for (int i = 0; i < n; ++i) {
          const Complex mu = es.eigenvalues()[i];
          report.eigenvalues.push_back(mu);
          const Vec v = es.eigenvectors().col(i);
          report.max_residual =
              std::max(report.max_residual, (m * v - mu * v).norm() / v.norm());
        }
        report.method = "general";
      }
      break;
    }
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](Complex a, Complex b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  return report;
}

}  // namespace perimode
