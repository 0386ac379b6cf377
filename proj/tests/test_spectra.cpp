#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "perimode/rng.hpp"
#include "perimode/signal.hpp"
#include "perimode/spectra.hpp"

using namespace perimode;

namespace {

// Random coefficients with conjugate symmetry, so the synthesized signal is
// real-valued.
SpectralCoefficients random_real_coefficients(int dim, int degree, std::uint64_t seed) {
  SeededRng rng(seed);
  SpectralCoefficients c = SpectralCoefficients::zeros(dim, degree);
  Vec c0(dim);
  for (int i = 0; i < dim; ++i) c0[i] = Complex(rng.normal(), 0.0);
  c.set_coeff(0, c0);
  for (int k = 1; k <= degree; ++k) {
    Vec ck(dim);
    for (int i = 0; i < dim; ++i) ck[i] = rng.complex_normal();
    c.set_coeff(k, ck);
    c.set_coeff(-k, ck.conjugate());
  }
  return c;
}

SpectralCoefficients random_complex_coefficients(int dim, int degree,
                                                 std::uint64_t seed) {
  SeededRng rng(seed);
  SpectralCoefficients c = SpectralCoefficients::zeros(dim, degree);
  for (int k = -degree; k <= degree; ++k) {
    Vec ck(dim);
    for (int i = 0; i < dim; ++i) ck[i] = rng.complex_normal();
    c.set_coeff(k, ck);
  }
  return c;
}

double max_coeff_dev(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Dft, ConstantSignal) {
  PeriodicSignal f = PeriodicSignal::zeros(2, 12);
  f.values().setConstant(Complex(3.5, 0.0));
  const SpectralCoefficients c = dft(f, 1);
  EXPECT_NEAR(std::abs(c.coeff(0)[0] - Complex(3.5, 0.0)), 0.0, 1e-14);
  EXPECT_NEAR(c.coeff(1).norm(), 0.0, 1e-14);
  EXPECT_NEAR(c.coeff(-1).norm(), 0.0, 1e-14);
}

TEST(Dft, SingleModeSignal) {
  const int N = 8;
  Vec x(3);
  x << Complex(1, 2), Complex(-0.5, 0), Complex(0, 1);
  PeriodicSignal f = PeriodicSignal::zeros(3, N);
  for (int j = 0; j < N; ++j)
    f.values().col(j) = std::exp(Complex(0.0, f.grid_point(j))) * x;
  const SpectralCoefficients c = dft(f, 2);
  EXPECT_NEAR((c.coeff(1) - x).norm(), 0.0, 1e-14);
  for (int k : {-2, -1, 0, 2}) EXPECT_NEAR(c.coeff(k).norm(), 0.0, 1e-13);
}

TEST(Dft, ClosedFormLowDegreeSignal) {
  // f(t) = 1 + 2cos(t) + 4sin(2t): c_0 = 1, c_{+-1} = 1, c_2 = -2i, c_{-2} = 2i.
  const int N = 16;
  PeriodicSignal f = PeriodicSignal::zeros(1, N);
  for (int j = 0; j < N; ++j) {
    const double t = f.grid_point(j);
    f.values()(0, j) = 1.0 + 2.0 * std::cos(t) + 4.0 * std::sin(2.0 * t);
  }
  const SpectralCoefficients c = dft(f, 3);
  EXPECT_NEAR(std::abs(c.coeff(0)[0] - Complex(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.coeff(1)[0] - Complex(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.coeff(-1)[0] - Complex(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.coeff(2)[0] - Complex(0, -2)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.coeff(-2)[0] - Complex(0, 2)), 0.0, 1e-14);
  EXPECT_NEAR(c.coeff(3).norm(), 0.0, 1e-14);
}

TEST(Dft, DefaultTruncationIsWidestUnaliased) {
  EXPECT_EQ(dft(PeriodicSignal::zeros(1, 9)).truncation(), 4);
  EXPECT_EQ(dft(PeriodicSignal::zeros(1, 8)).truncation(), 3);
}

TEST(RoundTrip, CoefficientsSurviveSynthesizeThenDft) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SpectralCoefficients c = random_complex_coefficients(4, 3, seed);
    for (int N : {7, 8, 16, 31}) {
      const SpectralCoefficients back = dft(synthesize(c, N), 3);
      EXPECT_LE(max_coeff_dev(c, back), 1e-12) << "seed " << seed << " N " << N;
    }
  }
}

TEST(RoundTrip, SamplesSurviveDftThenSynthesize) {
  const PeriodicSignal f = synthesize(random_real_coefficients(4, 3, 11), 16);
  const PeriodicSignal back = synthesize(dft(f, 3), 16);
  EXPECT_LE((f.values() - back.values()).cwiseAbs().maxCoeff(),
            1e-12 * f.sup_norm());
}

TEST(Invariants, HoldOnSeededBandLimitedSignals) {
  // Round-trip, conjugate symmetry, and Parseval on 100 seeded signals.
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const int dim = 1 + static_cast<int>(seed % 4);
    const int degree = 1 + static_cast<int>(seed % 7);
    const int N = 2 * degree + 1 + static_cast<int>(seed % 10);
    const SpectralCoefficients c = random_real_coefficients(dim, degree, seed);
    const PeriodicSignal f = synthesize(c, N);
    const SpectralCoefficients back = dft(f, degree);

    const double scale = std::max(1.0, c.l2_norm());
    EXPECT_LE(max_coeff_dev(c, back), 1e-12 * scale) << "seed " << seed;

    for (int k = 0; k <= degree; ++k)
      EXPECT_LE((back.coeff(-k) - back.coeff(k).conjugate()).norm(), 1e-12 * scale)
          << "seed " << seed << " k " << k;

    const double grid_energy = f.l2_norm() * f.l2_norm();
    const double coeff_energy = back.l2_norm() * back.l2_norm();
    EXPECT_LE(std::abs(grid_energy - coeff_energy), 1e-12 * std::max(1.0, grid_energy))
        << "seed " << seed;
  }
}

TEST(Synthesize, ZeroAndConstantCoefficients) {
  SpectralCoefficients c = SpectralCoefficients::zeros(2, 2);
  EXPECT_NEAR(synthesize(c, 8).sup_norm(), 0.0, 0.0);
  Vec c0(2);
  c0 << Complex(2, -1), Complex(0, 3);
  c.set_coeff(0, c0);
  const PeriodicSignal g = synthesize(c, 8);
  for (int j = 0; j < 8; ++j) EXPECT_LE((g.sample(j) - c0).norm(), 1e-14);
}

TEST(Fejer, ConstantPassesThroughAndSingleModeIsHalved) {
  SpectralCoefficients c = SpectralCoefficients::zeros(1, 1);
  c.set_coeff(0, Vec::Constant(1, Complex(4, 0)));
  Vec x(1);
  x << Complex(1, 1);
  c.set_coeff(1, x);

  const PeriodicSignal s = fejer_sum(c, 1, 8);
  for (int j = 0; j < 8; ++j) {
    const Complex expected =
        Complex(4, 0) + 0.5 * x[0] * std::exp(Complex(0.0, s.grid_point(j)));
    EXPECT_LE(std::abs(s.values()(0, j) - expected), 1e-14);
  }
}

TEST(Fejer, WeightedSumEqualsDoubleSumAverage) {
  // sigma_n as the explicit (1/(n+1)) sum of partial sums, the two forms must
  // agree to rounding.
  const SpectralCoefficients c = random_complex_coefficients(3, 5, 21);
  const int N = 16;
  for (int n : {0, 1, 3, 5}) {
    Mat average = Mat::Zero(3, N);
    for (int m = 0; m <= n; ++m) {
      SpectralCoefficients partial = SpectralCoefficients::zeros(3, m);
      for (int k = -m; k <= m; ++k) partial.set_coeff(k, c.coeff(k));
      average += synthesize(partial, N).values();
    }
    average /= static_cast<double>(n + 1);
    const PeriodicSignal direct = fejer_sum(c, n, N);
    EXPECT_LE((direct.values() - average).cwiseAbs().maxCoeff(), 1e-13) << "n " << n;
  }
}

TEST(Fejer, ErrorNonIncreasingTowardsZero) {
  const SpectralCoefficients c = random_real_coefficients(2, 5, 33);
  const int N = 64;
  const PeriodicSignal f = synthesize(c, N);
  double previous = -1.0;
  for (int n = 0; n <= 5; ++n) {
    const PeriodicSignal s = fejer_sum(c, n, N);
    const double err = (s.values() - f.values()).norm() / std::sqrt(double(N));
    if (previous >= 0.0) EXPECT_LE(err, previous + 1e-15) << "n " << n;
    previous = err;
  }
}

TEST(Derivative, SymbolsMatchSpec) {
  SpectralCoefficients c = SpectralCoefficients::zeros(1, 2);
  Vec x(1);
  x << Complex(1, 0);
  c.set_coeff(1, x);
  c.set_coeff(2, x);
  const SpectralCoefficients d3 = spectral_derivative(c, DerivativeOrder::third);
  EXPECT_LE(std::abs(d3.coeff(1)[0] - Complex(0, -1)), 1e-15);  // (i)^3 = -i
  const SpectralCoefficients d2 = spectral_derivative(c, DerivativeOrder::second);
  EXPECT_LE(std::abs(d2.coeff(2)[0] - Complex(-4, 0)), 1e-15);  // (2i)^2 = -4
}

TEST(Derivative, FirstAppliedThriceEqualsThird) {
  const SpectralCoefficients c = random_complex_coefficients(3, 6, 5);
  SpectralCoefficients iterated = spectral_derivative(c, DerivativeOrder::first);
  iterated = spectral_derivative(iterated, DerivativeOrder::first);
  iterated = spectral_derivative(iterated, DerivativeOrder::first);
  const SpectralCoefficients direct = spectral_derivative(c, DerivativeOrder::third);
  EXPECT_LE(max_coeff_dev(iterated, direct), 1e-13 * std::max(1.0, direct.l2_norm()));
}

TEST(Derivative, ThirdDerivativeOfCosineOnGrid) {
  // d^3/dt^3 cos(3t) = 27 sin(3t).
  const int N = 32;
  PeriodicSignal f = PeriodicSignal::zeros(1, N);
  for (int j = 0; j < N; ++j) f.values()(0, j) = std::cos(3.0 * f.grid_point(j));
  const PeriodicSignal d3 = synthesize(spectral_derivative(dft(f), DerivativeOrder::third), N);
  for (int j = 0; j < N; ++j)
    EXPECT_LE(std::abs(d3.values()(0, j) - 27.0 * std::sin(3.0 * f.grid_point(j))), 1e-10);
}

TEST(Windows, ErrorsOnBadArguments) {
  const PeriodicSignal f = PeriodicSignal::zeros(1, 8);
  EXPECT_THROW(dft(f, 4), WindowError);   // 2K+1 = 9 > 8
  EXPECT_THROW(dft(f, -1), WindowError);
  const SpectralCoefficients c = SpectralCoefficients::zeros(1, 3);
  EXPECT_THROW(synthesize(c, 6), WindowError);  // N < 2K+1
  EXPECT_THROW(fejer_sum(c, 4, 16), WindowError);  // n > K
  EXPECT_THROW(fejer_sum(c, -1, 16), WindowError);
  EXPECT_THROW(c.coeff(4), WindowError);
  EXPECT_NO_THROW(dft(f, 3));
}
