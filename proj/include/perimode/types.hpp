#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace perimode {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Closed integer interval of Fourier modes [lo, hi].
struct ModeWindow {
  int lo = 0;
  int hi = 0;

  static ModeWindow symmetric(int half_width) { return {-half_width, half_width}; }

  int count() const { return hi - lo + 1; }
  bool contains(int k) const { return lo <= k && k <= hi; }
};

/// Coefficient window does not fit the sample grid (2K+1 > N), or a Cesaro
/// order exceeds the available truncation.
class WindowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (lambda*I - A) is numerically singular at the requested shift.
class SingularShiftError : public std::runtime_error {
 public:
  SingularShiftError(Complex shift, double smallest_singular_value)
      : std::runtime_error(format(shift, smallest_singular_value)),
        shift_(shift),
        sigma_min_(smallest_singular_value) {}

  Complex shift() const { return shift_; }
  double smallest_singular_value() const { return sigma_min_; }

 private:
  static std::string format(Complex shift, double sigma_min) {
    std::ostringstream os;
    os << "singular shift: lambda = (" << shift.real() << ", " << shift.imag()
       << "), smallest singular value " << sigma_min;
    return os.str();
  }

  Complex shift_;
  double sigma_min_;
};

/// The mode gate found integer modes where the characteristic operator is not
/// invertible; solving is refused.
class WellPosednessError : public std::runtime_error {
 public:
  explicit WellPosednessError(std::vector<int> singular_modes)
      : std::runtime_error(format(singular_modes)),
        singular_modes_(std::move(singular_modes)) {}

  const std::vector<int>& singular_modes() const { return singular_modes_; }

 private:
  static std::string format(const std::vector<int>& modes) {
    std::ostringstream os;
    os << "ill-posed periodic problem: singular modes {";
    for (std::size_t i = 0; i < modes.size(); ++i) os << (i ? ", " : "") << modes[i];
    os << "}";
    return os.str();
  }

  std::vector<int> singular_modes_;
};

/// Malformed input file or schema violation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FamilyTooLargeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedKindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace perimode
