#pragma once

// Reference values produced offline by tests/oracles/derive_values.py
// (scipy Bessel functions and QUADPACK Fourier integrals, m = 1).

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

struct EqualTime {
  double mr;
  double value;
};

inline constexpr std::array<EqualTime, 5> kEqualTime = {{
    {0.1, 2.4960080415642056},
    {0.5, 0.083916287456287042},
    {1.0, 0.015246488251616222},
    {2.0, 0.0017714220871036729},
    {5.0, 2.0490251083446361e-05},
}};

struct Spacelike {
  double t, r, value;
};

inline constexpr std::array<Spacelike, 3> kSpacelike = {{
    {0.5, 1.0, 0.02228567642204653},
    {1.0, 2.0, 0.0029298400032265197},
    {0.3, 0.8, 0.032976657881242162},
}};

struct Timelike {
  double t, r, re, im;
};

inline constexpr std::array<Timelike, 3> kTimelike = {{
    {2.0, 1.0, -0.0060867115750928595, 0.013310376124645345},
    {1.5, 0.5, -0.01320946440656583, 0.015318397120658404},
    {3.0, 1.0, 0.0038420825799903558, 0.0056297079635147544},
}};

inline constexpr double kFourPiSquared = 4.0 * std::numbers::pi * std::numbers::pi;

/// m K1(m s) / (4 pi^2 s), the equal-time / spacelike Wightman function.
inline double bessel_spacelike(double s, double m) { return m * std::cyl_bessel_k(1.0, m * s) / (kFourPiSquared * s); }

/// (m / (8 pi s)) [Y1(m s) + i J1(m s)], the timelike Wightman function for t > 0.
inline std::complex<double> bessel_timelike(double s, double m) {
  const double pre = m / (8.0 * std::numbers::pi * s);
  return {pre * std::cyl_neumann(1.0, m * s), pre * std::cyl_bessel_j(1.0, m * s)};
}

}  // namespace oracle
