#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "perimode/multiplier.hpp"
#include "perimode/operators.hpp"
#include "perimode/oracle.hpp"
#include "perimode/rng.hpp"
#include "perimode/solver.hpp"
#include "perimode/spectra.hpp"

using namespace perimode;

namespace {

PeriodicSignal cosine_forcing(int dim, int samples, int mode) {
  PeriodicSignal f = PeriodicSignal::zeros(dim, samples);
  for (int j = 0; j < samples; ++j)
    f.values().col(j).setConstant(std::cos(mode * f.grid_point(j)));
  return f;
}

PeriodicSignal random_band_limited(int dim, int samples, int degree,
                                   std::uint64_t seed) {
  SeededRng rng(seed);
  Mat m = Mat::Zero(dim, 2 * degree + 1);
  for (int i = 0; i < dim; ++i) m(i, degree) = rng.normal();
  for (int k = 1; k <= degree; ++k) {
    for (int i = 0; i < dim; ++i) {
      const Complex v = rng.complex_normal();
      m(i, degree + k) = v;
      m(i, degree - k) = std::conj(v);
    }
  }
  return synthesize(SpectralCoefficients(degree, m), samples);
}

double max_column_dev(const PeriodicSignal& a, const PeriodicSignal& b) {
  double dev = 0.0;
  for (int j = 0; j < a.size(); ++j)
    dev = std::max(dev, (a.sample(j) - b.sample(j)).norm());
  return dev;
}

// Sup-norm error of the fd2 collocation solution for z''' = -z + cos t,
// whose exact periodic solution is z = (cos t - sin t)/2.
double fd2_error_against_exact_scalar(int N) {
  const auto a = LinearOperatorHandle::scalar(Complex(-1, 0));
  const PeriodicSignal z = collocation_solve(a, cosine_forcing(1, N, 1), D3Mode::fd2);
  double err = 0.0;
  for (int j = 0; j < N; ++j) {
    const double t = kTwoPi * j / N;
    err = std::max(err, std::abs(z.sample(j)(0) -
                                 Complex(0.5 * (std::cos(t) - std::sin(t)))));
  }
  return err;
}

}  // namespace

TEST(DerivativeMatrix, SpectralIsExactOnCosine) {
  const int N = 16;
  const Eigen::MatrixXd d3 = third_derivative_matrix(N, D3Mode::spectral);
  Eigen::VectorXd samples(N), expected(N);
  for (int j = 0; j < N; ++j) {
    const double t = kTwoPi * j / N;
    samples(j) = std::cos(3.0 * t);
    expected(j) = 27.0 * std::sin(3.0 * t);  // (cos 3t)''' = 27 sin 3t
  }
  EXPECT_LE((d3 * samples - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DerivativeMatrix, SpectralMatchesTransformRoute) {
  // Dual route: raw-sum circulant against dft -> symbol -> synthesize.
  for (int N : {16, 17}) {
    const PeriodicSignal f = random_band_limited(1, N, 6, 400 + N);
    const Eigen::MatrixXd d3 = third_derivative_matrix(N, D3Mode::spectral);

    const PeriodicSignal viaTransform =
        synthesize(spectral_derivative(dft(f), DerivativeOrder::third), N);
    Vec via_matrix = Vec::Zero(N);
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) via_matrix(j) += d3(j, l) * f.sample(l)(0);

    double dev = 0.0;
    for (int j = 0; j < N; ++j)
      dev = std::max(dev, std::abs(via_matrix(j) - viaTransform.sample(j)(0)));
    EXPECT_LE(dev, 1e-10) << "N " << N;
  }
}

TEST(DerivativeMatrix, AnnihilatesConstants) {
  for (D3Mode mode : {D3Mode::spectral, D3Mode::fd2}) {
    const Eigen::MatrixXd d3 = third_derivative_matrix(12, mode);
    EXPECT_LE((d3 * Eigen::VectorXd::Ones(12)).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(DerivativeMatrix, Fd2IsSecondOrderOnSine) {
  // (sin t)''' = -cos t; the central stencil converges at O(h^2).
  const int N = 64;
  const Eigen::MatrixXd d3 = third_derivative_matrix(N, D3Mode::fd2);
  Eigen::VectorXd samples(N), expected(N);
  for (int j = 0; j < N; ++j) {
    const double t = kTwoPi * j / N;
    samples(j) = std::sin(t);
    expected(j) = -std::cos(t);
  }
  const double err = (d3 * samples - expected).cwiseAbs().maxCoeff();
  EXPECT_GT(err, 1e-5);  // genuinely second order, not spectral
  EXPECT_LE(err, 0.02);
}

TEST(DerivativeMatrix, RejectsTinyGrids) {
  EXPECT_THROW(third_derivative_matrix(4, D3Mode::spectral), std::invalid_argument);
  EXPECT_THROW(third_derivative_matrix(4, D3Mode::fd2), std::invalid_argument);
}

TEST(Collocation, SystemHasExpectedBlockStructure) {
  const auto A = dirichlet_laplacian(3);
  const int N = 8;
  const CollocationSystem sys = build_collocation(A, N, D3Mode::spectral);
  EXPECT_EQ(sys.N, N);
  EXPECT_EQ(sys.d, 3);
  ASSERT_EQ(sys.matrix.rows(), N * 3);
  const Eigen::MatrixXd d3 = third_derivative_matrix(N, D3Mode::spectral);
  const Mat a_dense = A.dense_matrix();
  // Diagonal block (j, j) is d3(j,j) I - A; off-diagonal (j, l) is d3(j,l) I.
  EXPECT_LE(
      (sys.matrix.block(0, 0, 3, 3) - (d3(0, 0) * Mat::Identity(3, 3) - a_dense))
          .cwiseAbs()
          .maxCoeff(),
      1e-14);
  EXPECT_LE((sys.matrix.block(0, 3, 3, 3) - d3(0, 1) * Mat::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
}

TEST(Collocation, SpectralModeMatchesModalSolverScalar) {
  const auto a = LinearOperatorHandle::scalar(Complex(-1, 0));
  const int N = 32;
  const PeriodicSignal f = cosine_forcing(1, N, 1);

  const PeriodicSignal via_collocation = collocation_solve(a, f, D3Mode::spectral);
  const SolveReport via_modes = solve_periodic(a, f, (N - 1) / 2);
  EXPECT_LE(max_column_dev(via_collocation, via_modes.solution), 1e-10);

  for (int j = 0; j < N; ++j) {
    const double t = kTwoPi * j / N;
    EXPECT_LE(std::abs(via_collocation.sample(j)(0) -
                       Complex(0.5 * (std::cos(t) - std::sin(t)))),
              1e-10);
  }
}

TEST(Collocation, SpectralModeMatchesModalSolverLaplacian) {
  const int n = 8;
  const auto A = dirichlet_laplacian(n);
  const int N = 24;
  const PeriodicSignal f = random_band_limited(n, N, 4, 91);

  const PeriodicSignal via_collocation = collocation_solve(A, f, D3Mode::spectral);
  const SolveReport via_modes = solve_periodic(A, f, 11);
  const double scale = 1.0 + via_modes.solution.sup_norm();
  EXPECT_LE(max_column_dev(via_collocation, via_modes.solution), 1e-9 * scale);
}

TEST(Collocation, ZeroForcingGivesZero) {
  const auto A = dirichlet_laplacian(4);
  for (D3Mode mode : {D3Mode::spectral, D3Mode::fd2}) {
    const PeriodicSignal z =
        collocation_solve(A, PeriodicSignal::zeros(4, 16), mode);
    EXPECT_LE(z.sup_norm(), 1e-12);
  }
}

TEST(Collocation, Fd2ObservedOrderIsTwo) {
  const double e32 = fd2_error_against_exact_scalar(32);
  const double e64 = fd2_error_against_exact_scalar(64);
  const double e128 = fd2_error_against_exact_scalar(128);
  const double order_low = std::log2(e32 / e64);
  const double order_high = std::log2(e64 / e128);
  EXPECT_NEAR(order_low, 2.0, 0.2);
  EXPECT_NEAR(order_high, 2.0, 0.2);
}

TEST(Collocation, SizeCapIsEnforced) {
  const auto A = dirichlet_laplacian(64);
  EXPECT_THROW(build_collocation(A, 65, D3Mode::spectral), std::invalid_argument);
  EXPECT_THROW(collocation_solve(A, PeriodicSignal::zeros(64, 65), D3Mode::fd2),
               std::invalid_argument);
}

TEST(Rademacher, SingletonScaledIdentity) {
  const std::vector<Mat> family{Mat(2.0 * Mat::Identity(2, 2))};
  Vec x(2);
  x << Complex(1, 0), Complex(0, 0);
  const RademacherMoments m = exhaustive_rademacher(family, {x}, 2.0);
  EXPECT_EQ(m.patterns, 2u);
  EXPECT_NEAR(m.numerator, 2.0, 1e-14);
  EXPECT_NEAR(m.denominator, 1.0, 1e-14);
  EXPECT_NEAR(m.ratio, 2.0, 1e-14);
}

TEST(Rademacher, OrthogonalityClosedFormAtPTwo) {
  // At p = 2 the sign expectation collapses: ratio equals
  // sqrt(sum |T_j x_j|^2 / sum |x_j|^2).
  SeededRng rng(1234);
  std::vector<Mat> family;
  std::vector<Vec> probes;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 6; ++j) {
    Mat m(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = rng.complex_normal();
    const Vec x = rng.unit_vector(2);
    family.push_back(m);
    probes.push_back(x);
    num += (m * x).squaredNorm();
    den += x.squaredNorm();
  }
  const RademacherMoments moments = exhaustive_rademacher(family, probes, 2.0);
  EXPECT_NEAR(moments.ratio, std::sqrt(num / den), 1e-12);
}

TEST(Rademacher, MatchesIndependentTripleLoopAtPFour) {
  SeededRng rng(77);
  std::vector<Mat> family;
  std::vector<Vec> probes;
  for (int j = 0; j < 3; ++j) {
    Mat m(2, 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = rng.complex_normal();
    family.push_back(m);
    probes.push_back(rng.unit_vector(2));
  }

  // Second enumeration with explicit nested sign loops, no bit masks.
  double num = 0.0, den = 0.0;
  int patterns = 0;
  for (double s0 : {1.0, -1.0})
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0}) {
        const Vec s = s0 * (family[0] * probes[0]) + s1 * (family[1] * probes[1]) +
                      s2 * (family[2] * probes[2]);
        const Vec t = s0 * probes[0] + s1 * probes[1] + s2 * probes[2];
        num += std::pow(s.norm(), 4.0);
        den += std::pow(t.norm(), 4.0);
        ++patterns;
      }
  const double expected =
      std::pow(num / patterns, 0.25) / std::pow(den / patterns, 0.25);

  const RademacherMoments moments = exhaustive_rademacher(family, probes, 4.0);
  EXPECT_EQ(moments.patterns, 8u);
  EXPECT_NEAR(moments.ratio, expected, 1e-13);
}

TEST(Rademacher, AgreesWithEnumerationEstimator) {
  SeededRng rng(31);
  std::vector<Mat> family;
  std::vector<Vec> probes;
  for (int j = 0; j < 5; ++j) {
    Mat m(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = rng.complex_normal();
    family.push_back(m);
    probes.push_back(rng.unit_vector(3));
  }
  const RademacherMoments moments = exhaustive_rademacher(family, probes, 2.0);
  const RBoundEstimate estimate =
      r_bound_estimate(family, RBoundMethod::enumeration, {}, &probes);
  EXPECT_NEAR(moments.ratio, estimate.value, 1e-13);
}

TEST(Rademacher, ArgumentErrors) {
  std::vector<Mat> family{Mat::Identity(2, 2)};
  const std::vector<Vec> probes{Vec(Vec::Ones(2))};
  EXPECT_THROW(exhaustive_rademacher({}, {}, 2.0), std::invalid_argument);
  EXPECT_THROW(exhaustive_rademacher(family, {}, 2.0), DimensionError);
  EXPECT_THROW(exhaustive_rademacher(family, probes, 0.0), std::invalid_argument);
  EXPECT_THROW(exhaustive_rademacher(family, {Vec(Vec::Zero(2))}, 2.0),
               std::invalid_argument);

  const std::vector<Mat> big(13, Mat::Identity(1, 1));
  const std::vector<Vec> big_probes(13, Vec(Vec::Ones(1)));
  EXPECT_THROW(exhaustive_rademacher(big, big_probes, 2.0), FamilyTooLargeError);

  const std::vector<Vec> mismatched{Vec(Vec::Ones(3))};
  EXPECT_THROW(exhaustive_rademacher(family, mismatched, 2.0), DimensionError);
}
