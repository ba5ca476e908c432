#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "qfield/errors.hpp"

namespace qfield {

/// The deformation parameter. Carried explicitly through every computation;
/// q = 1 is Bose statistics, q = -1 Fermi statistics.
struct QParam {
  double q = 1.0;

  constexpr QParam() = default;
  constexpr explicit QParam(double value) : q(value) {}

  constexpr double value() const { return q; }
  constexpr operator double() const { return q; }
};

namespace detail {
inline constexpr double kUnitQThreshold = 1e-12;
}

/// Basic number <n>_q = (q^n - 1)/(q - 1); equals n at q = 1.
///
/// For moderate n the value is accumulated as 1 + q + ... + q^(n-1), which is
/// the same polynomial without the cancellation of the quotient form near q = 1.
inline double basic_number(QParam q, int n) {
  if (n < 0) throw DomainError("basic_number: n must be nonnegative, got " + std::to_string(n));
  if (std::abs(q.q - 1.0) < detail::kUnitQThreshold) return static_cast<double>(n);
  if (n <= 64) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 0; k < n; ++k) {
      sum += power;
      power *= q.q;
    }
    return sum;
  }
  return (std::pow(q.q, n) - 1.0) / (q.q - 1.0);
}

/// Deformed Planck occupancy 1/(e^x - q) with x = h nu_q / kT.
/// Bose-Einstein at q = 1, Fermi-Dirac at q = -1, Boltzmann at q = 0.
inline double q_occupancy(double x, QParam q) {
  const double ex = std::exp(x);
  const double denom = ex - q.q;
  if (!std::isfinite(ex) && std::isfinite(q.q)) return 0.0;
  if (std::abs(denom) <= 1e-15 * std::max(1.0, std::abs(ex))) {
    throw PoleError("q_occupancy: e^x equals q (x = " + std::to_string(x) +
                    ", q = " + std::to_string(q.q) + ")");
  }
  return 1.0 / denom;
}

}  // namespace qfield
