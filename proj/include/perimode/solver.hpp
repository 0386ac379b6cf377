#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "perimode/multiplier.hpp"
#include "perimode/operators.hpp"
#include "perimode/rng.hpp"
#include "perimode/signal.hpp"
#include "perimode/spectra.hpp"
#include "perimode/types.hpp"

namespace perimode {

/// Result of scanning a mode window for singular shifts Delta_k = -ik^3*I - A.
///
/// Two independent routes are reported: the margin route (smallest singular
/// value of Delta_k per mode, authoritative) and the eigenvalue route (match
/// eigenvalues of A against the shift lattice {-ik^3 : k integer}).
struct SpectrumGateReport {
  ModeWindow window{0, 0};
  std::vector<int> singular_modes;   // margin route, sorted ascending
  std::vector<double> margins;       // sigma_min(Delta_k), indexed k - window.lo
  std::vector<int> eigen_route_modes;
  bool routes_agree = true;

  double operator_norm = 0.0;  // |A|_2
  int k_star = 0;              // |k| >= k_star certifies sigma_min > 0 outright
  bool certified_complete = false;  // window covers [-(k_star-1), k_star-1]

  bool well_posed() const { return singular_modes.empty() && certified_complete; }
};

/// Scans Delta_k for singularity over the window and certifies completeness:
/// for |k|^3 > |A|_2 the shift dominates and Delta_k is invertible, so only
/// |k| < k_star can be singular.  The report lists sigma_Z(Delta) within the
/// window; with certified_complete set, that list is all of sigma_Z(Delta).
inline SpectrumGateReport spectrum_gate(const LinearOperatorHandle& A,
                                        ModeWindow window) {
  if (window.lo > window.hi) throw WindowError("mode window is empty");
  SpectrumGateReport report;
  report.window = window;
  report.margins.reserve(window.count());

  for (int k = window.lo; k <= window.hi; ++k) {
    const Complex lambda = third_order_shift(k);
    const double margin = A.shift_margin(lambda);
    report.margins.push_back(margin);
    if (margin <= A.singular_tolerance(lambda)) report.singular_modes.push_back(k);
  }

  report.operator_norm = A.operator_norm();
  int k_star = 0;
  while (static_cast<double>(k_star) * k_star * k_star <=
         report.operator_norm * (1.0 + 1e-6) + 1.0)
    ++k_star;
  report.k_star = k_star;
  report.certified_complete =
      window.lo <= -(k_star - 1) && window.hi >= k_star - 1;

  // Eigenvalue route: an eigenvalue mu of A makes Delta_k singular exactly
  // when mu = -i k^3, i.e. mu is imaginary with -Im(mu) a perfect cube.
  const SpectrumReport spec = spectrum(A);
  const double eig_tol = 1e-8 * (1.0 + report.operator_norm) + spec.max_residual;
  for (const Complex& mu : spec.eigenvalues) {
    const int k = static_cast<int>(std::llround(std::cbrt(-mu.imag())));
    if (!window.contains(k)) continue;
    if (std::abs(mu - third_order_shift(k)) <= eig_tol)
      report.eigen_route_modes.push_back(k);
  }
  std::sort(report.eigen_route_modes.begin(), report.eigen_route_modes.end());
  report.eigen_route_modes.erase(
      std::unique(report.eigen_route_modes.begin(), report.eigen_route_modes.end()),
      report.eigen_route_modes.end());
  report.routes_agree = report.eigen_route_modes == report.singular_modes;
  return report;
}

enum class Reconstruction { partial_sum, fejer };

struct SolveOptions {
  Reconstruction recon = Reconstruction::partial_sum;
  int fejer_order = -1;  // < 0 means "use K" when fejer is selected
};

struct SolveReport {
  PeriodicSignal solution = PeriodicSignal::zeros(1, 1);
  SpectralCoefficients coefficients = SpectralCoefficients::zeros(1, 0);
  double residual_l2 = 0.0;   // discrete L2 norm of z''' - Az - f on the grid
  double residual_sup = 0.0;  // largest entry of the same residual
  int K = 0;
  int N = 0;
  SpectrumGateReport gate;
  double elapsed_ms = 0.0;
};

namespace detail {

/// Grid residual z''' - Az - f, with z''' recomputed by re-analyzing the
/// synthesized samples (full available bandwidth), independent of the modal
/// coefficients used to build z.
inline PeriodicSignal grid_residual(const LinearOperatorHandle& A,
                                    const PeriodicSignal& z,
                                    const PeriodicSignal& f) {
  const SpectralCoefficients zc = dft(z);
  const SpectralCoefficients z3c = spectral_derivative(zc, DerivativeOrder::third);
  const PeriodicSignal z3 = synthesize(z3c, z.size());
  PeriodicSignal r = PeriodicSignal::zeros(z.dim(), z.size());
  for (int j = 0; j < z.size(); ++j)
    r.values().col(j) = z3.sample(j) - A.apply(z.sample(j)) - f.sample(j);
  return r;
}

}  // namespace detail

/// Solves z''' = Az + f for the 2*pi-periodic z, mode by mode:
/// zhat(k) = Delta_k^{-1} fhat(k) for |k| <= K, then partial-sum (or Fejer)
/// reconstruction on the input grid.  The spectrum gate runs first; any
/// singular mode in the window is a well-posedness rejection.
inline SolveReport solve_periodic(const LinearOperatorHandle& A,
                                  const PeriodicSignal& f, int K,
                                  const SolveOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (K < 0) throw WindowError("truncation order must be non-negative");
  if (2 * K + 1 > f.size())
    throw WindowError("grid too coarse for truncation order: need N >= 2K+1");
  if (A.dim() != f.dim())
    throw DimensionError("operator and forcing dimensions differ");

  SolveReport report;
  report.K = K;
  report.N = f.size();
  report.gate = spectrum_gate(A, ModeWindow::symmetric(K));
  if (!report.gate.singular_modes.empty())
    throw WellPosednessError(report.gate.singular_modes);

  const SpectralCoefficients fc = dft(f, K);
  SpectralCoefficients zc = SpectralCoefficients::zeros(f.dim(), K);
  for (int k = -K; k <= K; ++k)
    zc.set_coeff(k, A.shifted_solve(third_order_shift(k), fc.coeff(k)));

  if (opt.recon == Reconstruction::fejer) {
    const int order = opt.fejer_order < 0 ? K : opt.fejer_order;
    report.solution = fejer_sum(zc, order, f.size());
  } else {
    report.solution = synthesize(zc, f.size());
  }
  report.coefficients = std::move(zc);

  const PeriodicSignal residual = detail::grid_residual(A, report.solution, f);
  report.residual_l2 = residual.l2_norm();
  report.residual_sup = residual.sup_norm();
  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return report;
}

/// Checks the kernel identity on the witness z(t) = e^{ikt} x: the grid
/// residual of z''' - Az has discrete L2 norm exactly |Delta_k x|.  The
/// residual is measured by grid re-analysis, the prediction by direct algebra.
struct KernelWitness {
  int k = 0;
  double residual_l2 = 0.0;  // measured on the grid
  double predicted = 0.0;    // |Delta_k x|
};

inline KernelWitness kernel_witness_check(const LinearOperatorHandle& A, int k,
                                          const Vec& x, int N = 0) {
  if (x.size() != A.dim())
    throw DimensionError("witness direction does not match operator dimension");
  if (N <= 0) N = 2 * std::abs(k) + 9;
  if (N < 2 * std::abs(k) + 2)
    throw WindowError("grid too coarse to represent the witness mode");

  PeriodicSignal z = PeriodicSignal::zeros(static_cast<int>(x.size()), N);
  for (int j = 0; j < N; ++j) {
    const double t = z.grid_point(j);
    z.values().col(j) = std::exp(Complex(0.0, k * t)) * x;
  }
  const PeriodicSignal zero = PeriodicSignal::zeros(z.dim(), N);
  const PeriodicSignal residual = detail::grid_residual(A, z, zero);

  KernelWitness witness;
  witness.k = k;
  witness.residual_l2 = residual.l2_norm();
  witness.predicted = (third_order_shift(k) * x - A.apply(x)).norm();
  return witness;
}

/// Re-solves every mode in a shuffled order with a perturb-and-restore pass
/// (solve against fhat(k) + delta*g and against delta*g, subtract) and reports
/// the largest relative deviation from the direct solve, over several trials.
/// Exercises uniqueness of the per-mode solutions; blows up only near a
/// singular shift.
struct UniquenessReport {
  double max_deviation = 0.0;
  int checked_modes = 0;
  int trials = 0;
};

inline UniquenessReport uniqueness_probe(const LinearOperatorHandle& A,
                                         const PeriodicSignal& f, int K,
                                         int trials = 3,
                                         std::uint64_t seed = 0) {
  if (2 * K + 1 > f.size())
    throw WindowError("grid too coarse for truncation order: need N >= 2K+1");
  if (trials < 1) throw std::invalid_argument("uniqueness probe needs trials >= 1");
  const SpectralCoefficients fc = dft(f, K);

  SeededRng rng(seed);
  UniquenessReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const std::vector<int> order = rng.permutation(2 * K + 1);
    for (int idx : order) {
      const int k = idx - K;
      const Complex lambda = third_order_shift(k);
      const Vec direct = A.shifted_solve(lambda, fc.coeff(k));

      const double delta = 1e-6 * (1.0 + fc.coeff(k).norm());
      const Vec g = delta * rng.unit_vector(A.dim());
      const Vec perturbed = A.shifted_solve(lambda, Vec(fc.coeff(k) + g));
      const Vec correction = A.shifted_solve(lambda, g);
      const Vec restored = perturbed - correction;

      const double deviation = (restored - direct).norm() / (1.0 + direct.norm());
      report.max_deviation = std::max(report.max_deviation, deviation);
      ++report.checked_modes;
    }
  }
  return report;
}

}  // namespace perimode
