#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfield/dirac.hpp"
#include "qfield/errors.hpp"
#include "qfield/kinematics.hpp"
#include "qfield/qcore.hpp"
#include "qfield/quadrature.hpp"

namespace qfield {

/// A propagator evaluation with its diagnostics. `quad_error` is present only
/// for values produced by quadrature.
template <class V>
struct PropagatorValue {
  V value;
  double onshell_distance = 0.0;  // |k^2 - m^2|
  std::optional<double> quad_error;
};

using ScalarValue = PropagatorValue<std::complex<double>>;
using MatrixValue = PropagatorValue<DiracMatrix>;

struct MassParam {
  double m = 0.0;

  constexpr MassParam() = default;
  explicit MassParam(double value) : m(value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw DomainError("mass must be finite and >= 0");
  }
  operator double() const { return m; }  // NOLINT
};

inline constexpr double kDefaultPoleGuard = 1e-10;

namespace detail {

inline double omega(const Vec3& k, double m) { return std::sqrt(k.squaredNorm() + m * m); }

struct OffShell {
  double denominator;  // k^2 - m^2
  double omega;
};

inline OffShell off_shell(const FourVector& k, double m, double guard) {
  const double d = k.square() - m * m;
  if (!(std::abs(d) > guard)) {
    throw PoleError("|k^2 - m^2| = " + std::to_string(std::abs(d)) + " inside pole guard " + std::to_string(guard));
  }
  const double w = omega(k.spatial(), m);
  if (!(w > 0.0)) throw PoleError("omega = 0: k0/omega undefined at zero mass and zero momentum");
  return {d, w};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Momentum space

/// (1/2)[(1+q) + (1-q) k0/omega] / (k^2 - m^2), with omega taken from the
/// spatial momentum in the current frame.
inline ScalarValue scalar_propagator_momentum(const FourVector& k, MassParam m, QParam q,
                                              double pole_guard = kDefaultPoleGuard) {
  const auto os = detail::off_shell(k, m, pole_guard);
  const double v = 0.5 * ((1.0 + q.q) / os.denominator + (1.0 - q.q) * (k.energy() / os.omega) / os.denominator);
  return {v, std::abs(os.denominator), std::nullopt};
}

/// Partial-fraction form (1/2 omega)[1/(k0 - omega) - q/(k0 + omega)]: right
/// pole of strength 1, left pole of strength q.
inline ScalarValue scalar_propagator_partial_fraction(const FourVector& k, MassParam m, QParam q,
                                                      double pole_guard = kDefaultPoleGuard) {
  const auto os = detail::off_shell(k, m, pole_guard);
  const double k0 = k.energy();
  const double v = (1.0 / (k0 - os.omega) - q.q / (k0 + os.omega)) / (2.0 * os.omega);
  return {v, std::abs(os.denominator), std::nullopt};
}

struct PoleResidues {
  double residue_plus = 0.0;   // at k0 = +omega
  double residue_minus = 0.0;  // at k0 = -omega
  double analytic_plus = 0.0;  // 1/2omega
  double analytic_minus = 0.0; // -q/2omega
  double error_estimate = 0.0;
};

namespace detail {

// Richardson extrapolation of f(h) -> f(0) for f analytic in h, halving h.
template <class F>
std::pair<double, double> richardson(F&& f, double h0, int levels) {
  std::vector<std::vector<double>> t(static_cast<std::size_t>(levels));
  double h = h0;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    auto& row = t[static_cast<std::size_t>(i)];
    row.push_back(f(h));
    double factor = 2.0;
    for (int j = 1; j <= i; ++j, factor *= 2.0) {
      const double fine = row[static_cast<std::size_t>(j - 1)];
      const double coarse = t[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
      row.push_back(fine + (fine - coarse) / (factor - 1.0));
    }
  }
  const auto& last = t.back();
  const auto& before = t[t.size() - 2];
  return {last.back(), std::abs(last.back() - before.back())};
}

}  // namespace detail

/// Pole strengths extracted numerically: (k0 -/+ omega) times the combined
/// (k^2 - m^2) form of the propagator is sampled on both sides of each pole and
/// Richardson-extrapolated to the pole.
inline PoleResidues pole_residues(const Vec3& kvec, MassParam m, QParam q) {
  const double w = detail::omega(kvec, m);
  if (!(w > 0.0)) throw DomainError("pole_residues: omega must be positive");
  const int levels = 6;
  const double h0 = 1e-2 * w;

  auto residue_at = [&](double pole) {
    auto sided = [&](double direction) {
      return detail::richardson(
          [&](double h) {
            const double k0 = pole + direction * h;
            const double dk = k0 - pole;
            return dk * scalar_propagator_momentum(FourVector(k0, kvec), m, q, 0.0).value.real();
          },
          h0, levels);
    };
    const auto [above, err_above] = sided(1.0);
    const auto [below, err_below] = sided(-1.0);
    return std::pair{0.5 * (above + below), err_above + err_below + std::abs(above - below)};
  };

  PoleResidues r;
  auto [plus, err_plus] = residue_at(w);
  auto [minus, err_minus] = residue_at(-w);
  r.residue_plus = plus;
  r.residue_minus = minus;
  r.analytic_plus = 1.0 / (2.0 * w);
  r.analytic_minus = -q.q / (2.0 * w);
  r.error_estimate = err_plus + err_minus;
  return r;
}

/// (1/2m)(m + p-slash) (1/2)[(1-q) + (1+q) p0/omega] / (p^2 - m^2): the scalar
/// structure with q replaced by -q.
inline MatrixValue spinor_propagator_momentum(const FourVector& p, MassParam m, QParam q,
                                              double pole_guard = kDefaultPoleGuard) {
  if (!(m.m > 0.0)) throw ZeroMassError("spinor propagator requires m > 0");
  const auto scalar = scalar_propagator_momentum(p, m, QParam(-q.q), pole_guard);
  const DiracMatrix numerator = (m.m * DiracMatrix::Identity() + slash(p)) / (2.0 * m.m);
  return {numerator * scalar.value, scalar.onshell_distance, std::nullopt};
}

enum class VectorForm {
  metric,            // g_{mu lambda}
  massive_projector  // g_{mu lambda} - k_mu k_lambda / m^2
};

/// Photon / vector propagator: tensor structure times the scalar q-propagator,
/// with lower indices. The half-sum scalar form is used, so q = -1 is allowed.
inline MatrixValue photon_propagator_momentum(const FourVector& k, MassParam m, QParam q,
                                              VectorForm form = VectorForm::metric,
                                              double pole_guard = kDefaultPoleGuard) {
  if (form == VectorForm::massive_projector && !(m.m > 0.0)) {
    throw ZeroMassError("massive vector projector requires m > 0");
  }
  const auto scalar = scalar_propagator_momentum(k, m, q, pole_guard);
  DiracMatrix tensor = DiracMatrix::Zero();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double t = metric(mu, nu);
      if (form == VectorForm::massive_projector) t -= k.lower(mu) * k.lower(nu) / (m.m * m.m);
      tensor(mu, nu) = t;
    }
  return {tensor * scalar.value, scalar.onshell_distance, std::nullopt};
}

/// Massless transverse (Coulomb-gauge) form: (delta_ij - k_i k_j / k^2) D_Fq(k).
inline PropagatorValue<Eigen::Matrix3cd> photon_transverse_propagator(const FourVector& k, QParam q,
                                                                      double pole_guard = kDefaultPoleGuard) {
  const auto scalar = scalar_propagator_momentum(k, MassParam(0.0), q, pole_guard);
  const Eigen::Matrix3cd p = transverse_projector(k.spatial()).cast<std::complex<double>>();
  return {p * scalar.value, scalar.onshell_distance, std::nullopt};
}

// ---------------------------------------------------------------------------
// Position space

struct PositionOptions {
  double rel_tol = 1e-8;
};

namespace detail {

inline constexpr double kFourPiSquared = 4.0 * std::numbers::pi * std::numbers::pi;

}  // namespace detail

/// Equal-time Wightman function i Delta_+(0, r)
///   = (1/(4 pi^2 r)) Int_0^inf dp p sin(p r) / omega.
/// The integral is Abel-summed: p/omega = 1 + (p/omega - 1), the first part
/// gives exactly 1/r and the remainder is integrated between zeros of sin(p r)
/// with an extrapolated tail.
inline PropagatorValue<double> delta_plus_equal_time(double r, MassParam m, const PositionOptions& opt = {}) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("delta_plus_equal_time: r must be > 0");
  const double mass = m.m;
  if (mass == 0.0) return {1.0 / (detail::kFourPiSquared * r * r), 0.0, std::nullopt};
  auto remainder = [mass](double p) {
    const double w = std::hypot(p, mass);
    return -mass * mass / (w * (p + w));
  };
  quad::OscillatoryOptions qopt;
  qopt.rel_tol = opt.rel_tol;
  qopt.abs_tol = 1e-14 / r;
  const auto tail = quad::fourier_half_line(r, remainder, qopt);
  const double integral = 1.0 / r + tail.value.imag();
  const double scale = 1.0 / (detail::kFourPiSquared * r);
  return {scale * integral, 0.0, scale * tail.error};
}

/// Abel-summed Int_0^inf dk k sin(k r) exp(-i omega t)/omega, divided by 4 pi^2 r.
/// This is i Delta_+(t, r) off the light cone.
inline PropagatorValue<std::complex<double>> wightman_plus(double t, double r, MassParam m,
                                                           const PositionOptions& opt = {}) {
  using C = std::complex<double>;
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(t)) throw DomainError("wightman_plus: requires finite t and r > 0");
  if (std::abs(std::abs(t) - r) <= 1e-12 * r) throw DomainError("wightman_plus: point lies on the light cone");
  const double mass = m.m;
  const double scale = 1.0 / (detail::kFourPiSquared * r);
  // sin(kr) e^{-ikt} integrates (Abel) to r/(r^2 - t^2)
  const C massless = r / ((r - t) * (r + t));
  if (mass == 0.0) return {scale * massless, 0.0, std::nullopt};

  auto phi = [mass, t](double k) -> C {
    const double w = std::hypot(k, mass);
    const double w_minus_k = mass * mass / (w + k);
    return (k / w) * std::polar(1.0, -w_minus_k * t) - 1.0;
  };
  quad::OscillatoryOptions qopt;
  qopt.rel_tol = opt.rel_tol;
  qopt.abs_tol = 1e-14 / r;
  const auto forward = quad::fourier_half_line(r - t, phi, qopt);
  const auto backward = quad::fourier_half_line(-(r + t), phi, qopt);
  const C remainder = (forward.value - backward.value) / C(0.0, 2.0);
  return {scale * (massless + remainder), 0.0, scale * (forward.error + backward.error)};
}

/// q-causal function in position space (returned as i Delta_Fq):
/// i Delta_+(t, r) for t > 0 and q i Delta_+(|t|, r) for t < 0.
inline PropagatorValue<std::complex<double>> causal_position(double t, double r, MassParam m, QParam q,
                                                             const PositionOptions& opt = {}) {
  if (t == 0.0) throw EqualTimeError("causal_position: t = 0 is not covered by the ordered branches");
  auto w = wightman_plus(std::abs(t), r, m, opt);
  if (t < 0.0) {
    w.value *= q.q;
    if (w.quad_error) *w.quad_error *= std::abs(q.q);
  }
  return w;
}

/// Equal-time q-commutator <0|(psi(x), psi-bar(x'))_q|0> at spacelike
/// separation r: (1 - q) Delta_+(0, r). Nonzero for q != 1.
inline PropagatorValue<double> spacelike_q_commutator(double r, MassParam m, QParam q,
                                                      const PositionOptions& opt = {}) {
  auto d = delta_plus_equal_time(r, m, opt);
  d.value *= (1.0 - q.q);
  if (d.quad_error) *d.quad_error *= std::abs(1.0 - q.q);
  return d;
}

/// Mixed (t, k) representation of i Delta_Fq: e^{-i omega t}/2omega for t > 0,
/// q e^{i omega t}/2omega for t < 0. Its time Fourier transform with the
/// Feynman prescription reproduces the momentum-space poles.
inline std::complex<double> causal_mixed(double t, const Vec3& kvec, MassParam m, QParam q) {
  const double w = detail::omega(kvec, m);
  if (!(w > 0.0)) throw DomainError("causal_mixed: omega must be positive");
  if (t == 0.0) throw EqualTimeError("causal_mixed: t = 0");
  if (t > 0.0) return std::polar(1.0, -w * t) / (2.0 * w);
  return q.q * std::polar(1.0, w * t) / (2.0 * w);
}

// ---------------------------------------------------------------------------
// Coefficient-level identities

/// Coefficients (c_plus, c_minus) of Delta_+ and Delta_- in a q-combination.
struct DeltaCombination {
  double c_plus = 1.0;
  double c_minus = 0.0;
  friend bool operator==(const DeltaCombination&, const DeltaCombination&) = default;
};

/// Delta_q^- = Delta_+ - q Delta_-.
inline DeltaCombination delta_q_minus(QParam q) { return {1.0, -q.q}; }
/// Delta_q^+ = Delta_+ + q Delta_-.
inline DeltaCombination delta_q_plus(QParam q) { return {1.0, q.q}; }

}  // namespace qfield
