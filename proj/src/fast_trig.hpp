#pragma once

#include <cmath>
#include <numbers>

namespace exlat::detail {

// cos(2 pi x) for |x| < 2^50. The argument is in turns, so range reduction is
// a subtraction of the nearest integer. No branches, so loops over it
// vectorise.
inline double cos_turns(double x) {
  constexpr double kRound = 6755399441055744.0;  // 1.5 * 2^52
  const double nearest = (x + kRound) - kRound;
  const double y = std::fabs(x - nearest);  // [0, 0.5]
  // cos(2 pi y) = sin(2 pi (1/4 - y)) with the sine argument in [-pi/2, pi/2].
  const double z = 2.0 * std::numbers::pi * (0.25 - y);
  const double t = z * z;
  // Taylor series of sin to z^21; truncation error below 2e-18 on [0, pi/2].
  double p = -1.0 / 51090942171709440000.0;
  p = p * t + 1.0 / 121645100408832000.0;
  p = p * t - 1.0 / 355687428096000.0;
  p = p * t + 1.0 / 1307674368000.0;
  p = p * t - 1.0 / 6227020800.0;
  p = p * t + 1.0 / 39916800.0;
  p = p * t - 1.0 / 362880.0;
  p = p * t + 1.0 / 5040.0;
  p = p * t - 1.0 / 120.0;
  p = p * t + 1.0 / 6.0;
  p = p * t - 1.0;
  return -z * p;
}

}  // namespace exlat::detail
