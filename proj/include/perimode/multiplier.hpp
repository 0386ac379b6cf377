#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "perimode/operators.hpp"
#include "perimode/rng.hpp"
#include "perimode/types.hpp"

namespace perimode {

/// Characteristic symbol of the k-th mode: Delta_k = lambda_k*I - A with
/// lambda_k = -i k^3 (so Delta_k zhat(k) = fhat(k) follows from z''' = Az + f).
inline Complex third_order_shift(int k) {
  const double k3 = static_cast<double>(k) * k * k;
  return Complex(0.0, -k3);
}

inline double spectral_norm(const Mat& m) {
  return Eigen::JacobiSVD<Mat>(m).singularValues()[0];
}

/// Max column sum (induced 1-norm), a cheap screening upper proxy.
inline double column_sum_norm(const Mat& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// Mode symbol M_k = -i k^3 * Delta_k^{-1}, assembled column-by-column from
/// shifted solves at lambda = -i k^3.
inline Mat mode_symbol(const LinearOperatorHandle& A, int k) {
  const Complex lambda = third_order_shift(k);
  const int d = A.dim();
  if (k == 0) {
    // The -ik^3 factor vanishes, but Delta_0 = -A must still be invertible.
    const double margin = A.shift_margin(lambda);
    if (margin <= A.singular_tolerance(lambda)) throw SingularShiftError(lambda, margin);
    return Mat::Zero(d, d);
  }
  return lambda * A.shifted_solve(lambda, Mat(Mat::Identity(d, d)));
}

/// The matrices M_k over a mode window, with per-mode spectral norms.
/// Singular modes are recorded in `skipped` and carry an empty symbol.
struct ModeSymbolFamily {
  ModeWindow window;
  std::vector<Mat> symbols;
  std::vector<double> norms;
  std::vector<int> skipped;
  std::string convention = "Delta_k = -i*k^3*I - A";

  bool has(int k) const {
    return window.contains(k) && symbols[k - window.lo].size() > 0;
  }
  const Mat& symbol(int k) const { return symbols[k - window.lo]; }
  double norm(int k) const { return norms[k - window.lo]; }

  double sup_norm() const {
    double s = 0.0;
    for (double n : norms) s = std::max(s, n);
    return s;
  }

  /// Symbols in mode order with singular modes dropped.
  std::vector<Mat> to_list() const {
    std::vector<Mat> list;
    for (const Mat& m : symbols)
      if (m.size() > 0) list.push_back(m);
    return list;
  }
};

inline ModeSymbolFamily build_symbol_family(const LinearOperatorHandle& A,
                                            ModeWindow window) {
  if (window.lo > window.hi) throw WindowError("mode window is empty");
  ModeSymbolFamily family;
  family.window = window;
  family.symbols.resize(window.count());
  family.norms.assign(window.count(), 0.0);
  for (int k = window.lo; k <= window.hi; ++k) {
    try {
      Mat m = mode_symbol(A, k);
      family.norms[k - window.lo] = spectral_norm(m);
      family.symbols[k - window.lo] = std::move(m);
    } catch (const SingularShiftError&) {
      family.skipped.push_back(k);
    }
  }
  return family;
}

struct TelescopingEntry {
  int k = 0;
  double direct_norm = 0.0;   // |k (M_{k+1} - M_k)|
  double rel_dev = 0.0;       // deviation from the closed form, relative
  bool skipped = false;
  std::string reason;
};

struct TelescopingReport {
  ModeWindow window;
  std::vector<TelescopingEntry> entries;
  double max_rel_dev = 0.0;
  double sup_direct_norm = 0.0;
  int checked = 0;
};

/// Marcinkiewicz difference check: compares D_k = k (M_{k+1} - M_k) computed
/// from assembled symbols against the closed form
/// (k^3/(k+1)^3) (3 + 3/k + 1/k^2) M_{k+1} (I - M_k).
/// k in {0, -1} is skipped with a marker (the closed form divides by k and k+1).
inline TelescopingReport telescoping_check(const LinearOperatorHandle& A,
                                           ModeWindow window) {
  if (window.lo > window.hi) throw WindowError("mode window is empty");
  const int d = A.dim();
  // one extra mode above the window so every k in it has a difference
  const ModeSymbolFamily family =
      build_symbol_family(A, ModeWindow{window.lo, window.hi + 1});

  TelescopingReport report;
  report.window = window;
  for (int k = window.lo; k <= window.hi; ++k) {
    TelescopingEntry entry;
    entry.k = k;
    if (k == 0 || k == -1) {
      entry.skipped = true;
      entry.reason = "closed form undefined at k in {0, -1}";
    } else if (!family.has(k) || !family.has(k + 1)) {
      entry.skipped = true;
      entry.reason = "singular shift";
    } else {
      const Mat& mk = family.symbol(k);
      const Mat& mk1 = family.symbol(k + 1);
      const double kd = static_cast<double>(k);
      const Mat direct = kd * (mk1 - mk);
      const double factor =
          (kd * kd * kd) / ((kd + 1) * (kd + 1) * (kd + 1)) *
          (3.0 + 3.0 / kd + 1.0 / (kd * kd));
      const Mat closed = factor * (mk1 * (Mat::Identity(d, d) - mk));
      entry.direct_norm = spectral_norm(direct);
      entry.rel_dev = spectral_norm(direct - closed) /
                      (1.0 + family.norm(k) * family.norm(k + 1));
      report.max_rel_dev = std::max(report.max_rel_dev, entry.rel_dev);
      report.sup_direct_norm = std::max(report.sup_direct_norm, entry.direct_norm);
      ++report.checked;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

enum class RBoundMethod { hilbert_exact, enumeration, monte_carlo };

inline const char* to_string(RBoundMethod m) {
  switch (m) {
    case RBoundMethod::hilbert_exact: return "hilbert-exact";
    case RBoundMethod::enumeration: return "enumeration";
    case RBoundMethod::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

struct RBoundOptions {
  double p = 2.0;
  int trials = 10000;      // total random sign draws for monte-carlo
  int probe_count = 32;    // probe sets explored by monte-carlo
  int ascent_iters = 0;    // projected-ascent steps for enumeration probes
  std::uint64_t seed = 1;
};

struct RBoundEstimate {
  double value = 0.0;
  RBoundMethod method = RBoundMethod::hilbert_exact;
  std::string bound;  // "exact" or "lower"
  double p = 2.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Exact Rademacher moment ratio for one probe set, by enumerating all 2^n
/// sign patterns: (E|sum r_j T_j x_j|^p)^{1/p} / (E|sum r_j x_j|^p)^{1/p}.
inline double enumerated_sign_ratio(const std::vector<Mat>& family,
                                    const std::vector<Vec>& probes, double p) {
  const int n = static_cast<int>(family.size());
  const int d = static_cast<int>(family[0].rows());
  std::vector<Vec> mapped(n);
  for (int j = 0; j < n; ++j) mapped[j] = family[j] * probes[j];

  double num = 0.0, den = 0.0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  Vec s(d), t(d);
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
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
  if (den == 0.0) throw std::invalid_argument("r-bound probes must not all be zero");
  if (num == 0.0) return 0.0;
  return std::pow(num / den, 1.0 / p);
}

/// Sampled Rademacher moment ratio with shared sign draws; returns the point
/// estimate minus two standard errors, a one-sided lower confidence value.
inline double sampled_sign_ratio(const std::vector<Mat>& family,
                                 const std::vector<Vec>& probes, double p,
                                 int draws, SeededRng& rng) {
  const int n = static_cast<int>(family.size());
  const int d = static_cast<int>(family[0].rows());
  std::vector<Vec> mapped(n);
  for (int j = 0; j < n; ++j) mapped[j] = family[j] * probes[j];

  double num = 0.0, den = 0.0, num2 = 0.0, den2 = 0.0;
  Vec s(d), t(d);
  for (int it = 0; it < draws; ++it) {
    s.setZero();
    t.setZero();
    for (int j = 0; j < n; ++j) {
      const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
      s += sign * mapped[j];
      t += sign * probes[j];
    }
    const double a = std::pow(s.norm(), p);
    const double b = std::pow(t.norm(), p);
    num += a;
    num2 += a * a;
    den += b;
    den2 += b * b;
  }
  num /= draws;
  den /= draws;
  num2 = num2 / draws - num * num;
  den2 = den2 / draws - den * den;
  if (den <= 0.0 || num <= 0.0) return 0.0;
  const double ratio = std::pow(num / den, 1.0 / p);
  // delta method on log(num)/p - log(den)/p
  const double rel_se = std::sqrt(std::max(num2, 0.0) / (num * num) +
                                  std::max(den2, 0.0) / (den * den)) /
                        (p * std::sqrt(static_cast<double>(draws)));
  return ratio * std::max(0.0, 1.0 - 2.0 * rel_se);
}

/// Deterministic singleton bound |T_j x| / |x| sharpened by a few power
/// iterations; never exceeds the spectral norm of T_j.
inline double singleton_ratio(const Mat& m, Vec x) {
  for (int it = 0; it < 3; ++it) {
    Vec y = m.adjoint() * (m * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
  }
  return (m * x).norm();
}

inline void check_family(const std::vector<Mat>& family) {
  if (family.empty()) throw std::invalid_argument("r-bound family must be non-empty");
  const Eigen::Index d = family[0].rows();
  for (const Mat& m : family)
    if (m.rows() != d || m.cols() != d)
      throw DimensionError("r-bound family members must share one dimension");
}

}  // namespace detail

/// Estimates the Rademacher bound of a finite family of matrices.
///
/// Regimes:
///  - hilbert-exact (p = 2): by sign orthogonality the optimal constant is
///    max_j |T_j|_2; computed exactly from singular values.
///  - enumeration (n <= 12): exact sign expectation for the given (or seeded)
///    probe set, optionally pushed upward by projected ascent over probes.
///    A certified lower bound of the constant.
///  - monte-carlo: random signs and probes (singleton subfamilies included),
///    sampled expectations reported minus two standard errors.  A lower-bound
///    estimate.
inline RBoundEstimate r_bound_estimate(const std::vector<Mat>& family,
                                       RBoundMethod method,
                                       const RBoundOptions& opt = {},
                                       const std::vector<Vec>* probes = nullptr) {
  detail::check_family(family);
  const int n = static_cast<int>(family.size());
  const int d = static_cast<int>(family[0].rows());
  if (probes && static_cast<int>(probes->size()) != n)
    throw DimensionError("probe set must match family size");

  RBoundEstimate estimate;
  estimate.method = method;
  estimate.p = opt.p;
  estimate.seed = opt.seed;

  switch (method) {
    case RBoundMethod::hilbert_exact: {
      if (opt.p != 2.0)
        throw std::invalid_argument("hilbert-exact regime requires p = 2");
      double best = 0.0;
      for (const Mat& m : family) best = std::max(best, spectral_norm(m));
      estimate.value = best;
      estimate.bound = "exact";
      return estimate;
    }

    case RBoundMethod::enumeration: {
      if (n > 12)
        throw FamilyTooLargeError("enumeration regime capped at 12 family members");
      SeededRng rng(opt.seed);
      std::vector<Vec> x;
      if (probes) {
        x = *probes;
      } else {
        x.reserve(n);
        for (int j = 0; j < n; ++j) x.push_back(rng.unit_vector(d));
      }
      double best = detail::enumerated_sign_ratio(family, x, opt.p);
      // Projected ascent: per-member power step plus weight sharpening toward
      // the strongest member; keep only improving probe sets.
      std::vector<Vec> current = x;
      for (int iter = 0; iter < opt.ascent_iters; ++iter) {
        std::vector<Vec> next(n);
        std::vector<double> gain(n);
        double max_gain = 0.0;
        for (int j = 0; j < n; ++j) {
          Vec y = family[j].adjoint() * (family[j] * current[j]);
          const double norm = y.norm();
          next[j] = norm > 0.0 ? Vec(y / norm) : current[j].normalized();
          gain[j] = (family[j] * next[j]).norm();
          max_gain = std::max(max_gain, gain[j]);
        }
        if (max_gain == 0.0) break;
        for (int j = 0; j < n; ++j) {
          const double w = std::pow(gain[j] / max_gain, iter + 1);
          next[j] *= std::max(w, 1e-8);
        }
        const double candidate = detail::enumerated_sign_ratio(family, next, opt.p);
        if (candidate > best) {
          best = candidate;
          current = std::move(next);
        }
      }
      estimate.value = best;
      estimate.bound = "lower";
      estimate.trials = 1 << n;
      return estimate;
    }

    case RBoundMethod::monte_carlo: {
      SeededRng rng(opt.seed);
      double best = 0.0;
      if (probes) {
        best = detail::sampled_sign_ratio(family, *probes, opt.p,
                                          std::max(opt.trials, 1), rng);
      } else {
        const int batches = std::max(opt.probe_count, 1);
        const int draws = std::max(opt.trials / batches, 1);
        for (int b = 0; b < batches; ++b) {
          if (b % 2 == 0) {
            const int j = rng.uniform_int(0, n - 1);
            best = std::max(best,
                            detail::singleton_ratio(family[j], rng.unit_vector(d)));
          } else {
            std::vector<Vec> x;
            x.reserve(n);
            for (int j = 0; j < n; ++j) x.push_back(rng.unit_vector(d));
            best = std::max(best,
                            detail::sampled_sign_ratio(family, x, opt.p, draws, rng));
          }
        }
      }
      estimate.value = best;
      estimate.bound = "lower";
      estimate.trials = opt.trials;
      return estimate;
    }
  }
  throw std::invalid_argument("unknown r-bound method");
}

/// Picks the regime a caller most likely wants: exact at p = 2, enumeration
/// for small families, otherwise monte-carlo.
inline RBoundEstimate r_bound_estimate(const std::vector<Mat>& family,
                                       const RBoundOptions& opt = {},
                                       const std::vector<Vec>* probes = nullptr) {
  RBoundMethod method = RBoundMethod::monte_carlo;
  if (opt.p == 2.0)
    method = RBoundMethod::hilbert_exact;
  else if (family.size() <= 12)
    method = RBoundMethod::enumeration;
  return r_bound_estimate(family, method, opt, probes);
}

/// Per-mode resolvent decay (1 + |k|^3) * |Delta_k^{-1}|_2 and its max.
struct DecayFit {
  ModeWindow window;
  std::vector<double> per_mode;
  double c_hat = 0.0;
  double sup_symbol_norm = 0.0;    // sup_k |M_k|_2 over the window
  std::vector<int> near_singular;  // flagged: per-mode value above threshold
  std::vector<int> singular;       // only populated when skip_singular is set
};

/// Fits the resolvent decay constant over a window:
/// per-mode value (1 + |k|^3) / sigma_min(Delta_k), c_hat = max over modes.
/// Also reports sup_k |M_k|_2 (= |k|^3 / sigma_min) as the boundedness witness.
///
/// Throws SingularShiftError on a singular mode unless skip_singular is set,
/// in which case the mode is excluded and listed.
inline DecayFit decay_estimate(const LinearOperatorHandle& A, ModeWindow window,
                               double near_singular_threshold = 1e5,
                               bool skip_singular = false) {
  if (window.lo > window.hi) throw WindowError("mode window is empty");
  DecayFit fit;
  fit.window = window;
  fit.per_mode.reserve(window.count());
  for (int k = window.lo; k <= window.hi; ++k) {
    const Complex lambda = third_order_shift(k);
    const double sigma_min = A.shift_margin(lambda);
    if (sigma_min <= A.singular_tolerance(lambda)) {
      if (!skip_singular) throw SingularShiftError(lambda, sigma_min);
      fit.singular.push_back(k);
      fit.per_mode.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const double k3 = std::abs(static_cast<double>(k)) *
                      std::abs(static_cast<double>(k)) *
                      std::abs(static_cast<double>(k));
    const double value = (1.0 + k3) / sigma_min;
    fit.per_mode.push_back(value);
    fit.c_hat = std::max(fit.c_hat, value);
    fit.sup_symbol_norm = std::max(fit.sup_symbol_norm, k3 / sigma_min);
    if (value > near_singular_threshold) fit.near_singular.push_back(k);
  }
  return fit;
}

}  // namespace perimode
