#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace saddle {

using cplx = std::complex<double>;

/// A point (z, w) of C^2.
using Point = Eigen::Vector2cd;
using Matrix2c = Eigen::Matrix2cd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  NotAttracting,
  Superattracting,
  CriticalOnSet,
  ConeCollapse,
  NotOnBasicSet,
  DepthInsufficient,
  AmbiguousMembership,
  NewtonDiverged,
  PeriodTooLarge,
  NotBaseOnly,
  NotNormalized,
  SignViolation,
  DegenerateExponents,
  InsufficientSamples,
  InvalidArgument,
  InvalidConfig,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Point make_point(cplx z, cplx w) {
  Point p;
  p << z, w;
  return p;
}

inline double distance(const Point& a, const Point& b) { return (a - b).norm(); }

/// Angle of w normalized to [0, 2pi).
inline double angle_of(cplx w) {
  double t = std::arg(w);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

inline double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

/// Signed difference a - b folded into (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  return d;
}

}  // namespace saddle
