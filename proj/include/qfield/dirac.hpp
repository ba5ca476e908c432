#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qfield/errors.hpp"
#include "qfield/kinematics.hpp"

namespace qfield {

using DiracMatrix = Eigen::Matrix4cd;
using SpinorComponents = Eigen::Vector4cd;
using Tensor4 = Eigen::Matrix4d;
using Matrix3 = Eigen::Matrix3d;

enum class SpinorKind { u, v };

struct DiracSpinor {
  SpinorComponents components;
  FourVector momentum;
  double mass = 0.0;
  int spin = 1;  // r in {1, 2}
  SpinorKind kind = SpinorKind::u;
};

/// Dirac representation: gamma^0 = diag(1, 1, -1, -1),
/// gamma^i = [[0, sigma_i], [-sigma_i, 0]].
inline const DiracMatrix& gamma(int mu) {
  static const std::array<DiracMatrix, 4> g = [] {
    using C = std::complex<double>;
    const C i{0.0, 1.0};
    std::array<Eigen::Matrix2cd, 3> sigma;
    sigma[0] << 0, 1, 1, 0;
    sigma[1] << 0, -i, i, 0;
    sigma[2] << 1, 0, 0, -1;
    std::array<DiracMatrix, 4> out;
    out[0] = DiracMatrix::Zero();
    out[0].diagonal() << 1, 1, -1, -1;
    for (int k = 0; k < 3; ++k) {
      out[k + 1] = DiracMatrix::Zero();
      out[k + 1].block<2, 2>(0, 2) = sigma[k];
      out[k + 1].block<2, 2>(2, 0) = -sigma[k];
    }
    return out;
  }();
  if (mu < 0 || mu > 3) throw DomainError("gamma index must be in 0..3");
  return g[static_cast<std::size_t>(mu)];
}

/// p-slash = gamma^mu p_mu.
inline DiracMatrix slash(const FourVector& p) {
  DiracMatrix out = DiracMatrix::Zero();
  for (int mu = 0; mu < 4; ++mu) out += gamma(mu) * p.lower(mu);
  return out;
}

/// Row vector psi-bar = psi^dagger gamma^0.
inline Eigen::RowVector4cd dirac_adjoint(const SpinorComponents& psi) { return psi.adjoint() * gamma(0); }

/// C = i gamma^2 gamma^0.
inline DiracMatrix charge_conjugation_matrix() {
  return std::complex<double>{0.0, 1.0} * gamma(2) * gamma(0);
}

namespace detail {

inline void check_on_shell(const FourVector& p, double m, const char* what) {
  if (!(p.energy() > 0.0)) throw OffShellError(std::string(what) + ": requires p^0 > 0");
  const double scale = std::max(1.0, p.energy() * p.energy());
  if (std::abs(p.square() - m * m) > 1e-10 * scale) {
    throw OffShellError(std::string(what) + ": p^2 = " + std::to_string(p.square()) + " but m^2 = " +
                        std::to_string(m * m));
  }
}

inline double mass_from(const FourVector& p, const char* what) {
  const double p2 = p.square();
  if (!(p2 > 0.0)) throw OffShellError(std::string(what) + ": momentum is not timelike");
  return std::sqrt(p2);
}

inline void check_spin(int r) {
  if (r != 1 && r != 2) throw DomainError("spin index must be 1 or 2");
}

}  // namespace detail

/// Positive-energy spinor normalized to u-bar u = 1, so that
/// sum_r u u-bar = (m + p-slash)/2m.
inline DiracSpinor u_spinor(const FourVector& p, int r, double m) {
  detail::check_spin(r);
  if (!(m > 0.0)) throw ZeroMassError("u_spinor: mass must be positive");
  detail::check_on_shell(p, m, "u_spinor");
  const double e = p.energy();
  const double norm = std::sqrt((e + m) / (2.0 * m));
  const std::complex<double> i{0.0, 1.0};
  const Vec3 pv = p.spatial();
  Eigen::Matrix2cd sigma_p;
  sigma_p << pv.z(), pv.x() - i * pv.y(), pv.x() + i * pv.y(), -pv.z();
  Eigen::Vector2cd xi = Eigen::Vector2cd::Zero();
  xi[r - 1] = 1.0;
  DiracSpinor s;
  s.components.head<2>() = norm * xi;
  s.components.tail<2>() = norm * sigma_p * xi / (e + m);
  s.momentum = p;
  s.mass = m;
  s.spin = r;
  s.kind = SpinorKind::u;
  return s;
}

inline DiracSpinor u_spinor(const FourVector& p, int r) { return u_spinor(p, r, detail::mass_from(p, "u_spinor")); }

/// v = C (gamma^0)^T u*. With C = i gamma^2 gamma^0 the map is an involution,
/// so applying it to a v spinor gives back the u spinor.
inline DiracSpinor charge_conjugate(const DiracSpinor& s) {
  DiracSpinor out = s;
  out.components = charge_conjugation_matrix() * gamma(0).transpose() * s.components.conjugate();
  out.kind = s.kind == SpinorKind::u ? SpinorKind::v : SpinorKind::u;
  return out;
}

/// Negative-energy spinor, defined as the charge conjugate of u(p, r);
/// v-bar v = -1 and sum_r v v-bar = (-m + p-slash)/2m.
inline DiracSpinor v_spinor(const FourVector& p, int r, double m) { return charge_conjugate(u_spinor(p, r, m)); }
inline DiracSpinor v_spinor(const FourVector& p, int r) { return v_spinor(p, r, detail::mass_from(p, "v_spinor")); }

/// Sum over r of psi psi-bar.
inline DiracMatrix spin_sum(const FourVector& p, double m, SpinorKind kind) {
  DiracMatrix out = DiracMatrix::Zero();
  for (int r = 1; r <= 2; ++r) {
    const auto s = kind == SpinorKind::u ? u_spinor(p, r, m) : v_spinor(p, r, m);
    out += s.components * dirac_adjoint(s.components);
  }
  return out;
}

/// Energy projector Theta^(+/-) = (+/-m + p-slash)/2m; sign is +1 or -1.
inline DiracMatrix theta_projector(const FourVector& p, int sign, double m) {
  if (!(m > 0.0)) throw ZeroMassError("theta_projector: mass must be positive");
  if (sign != 1 && sign != -1) throw DomainError("theta_projector: sign must be +1 or -1");
  detail::check_on_shell(p, m, "theta_projector");
  return (sign * m * DiracMatrix::Identity() + slash(p)) / (2.0 * m);
}

inline DiracMatrix theta_projector(const FourVector& p, int sign) {
  return theta_projector(p, sign, detail::mass_from(p, "theta_projector"));
}

/// Spinor representation of an active boost: S = cosh(eta/2) + sinh(eta/2) n.alpha
/// with alpha^i = gamma^0 gamma^i. S slash(p) S^-1 = slash(boost(p, b)) and
/// S u(p) solves the Dirac equation at boost(p, b).
inline DiracMatrix spinor_boost(const Boost& b) {
  const double beta = b.beta().norm();
  if (beta == 0.0) return DiracMatrix::Identity();
  const Vec3 n = b.beta() / beta;
  const double eta = b.rapidity();
  DiracMatrix alpha_n = DiracMatrix::Zero();
  for (int k = 0; k < 3; ++k) alpha_n += n[k] * gamma(0) * gamma(k + 1);
  return std::cosh(eta / 2.0) * DiracMatrix::Identity() + std::sinh(eta / 2.0) * alpha_n;
}

// ---------------------------------------------------------------------------
// Massive vector polarizations

/// Rest-frame unit vectors along the three axes, boosted to momentum p:
/// e(p, r) = (p.e_r / m, e_r + (p.e_r) p / (m (E + m))). Each satisfies e.p = 0
/// and e_r . e_s = -delta_rs.
inline std::array<FourVector, 3> polarization_vectors(const FourVector& p, double m) {
  if (!(m > 0.0)) throw ZeroMassError("polarization_vectors: mass must be positive; use transverse_projector");
  detail::check_on_shell(p, m, "polarization_vectors");
  const Vec3 pv = p.spatial();
  const double e = p.energy();
  std::array<FourVector, 3> out;
  for (int r = 0; r < 3; ++r) {
    Vec3 axis = Vec3::Zero();
    axis[r] = 1.0;
    const double pe = pv.dot(axis);
    out[static_cast<std::size_t>(r)] = FourVector(pe / m, axis + pe / (m * (e + m)) * pv);
  }
  return out;
}

/// Explicit-basis polarization sum with lower indices, sum_r e_alpha e_beta.
inline Tensor4 polarization_sum(const FourVector& p, double m) {
  Tensor4 out = Tensor4::Zero();
  for (const auto& e : polarization_vectors(p, m))
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) out(a, b) += e.lower(a) * e.lower(b);
  return out;
}

/// Closed forms for the polarization sum. The explicit basis reproduces
/// `metric_consistent` = -g + p p / m^2 in the (+,-,-,-) metric; `literal` is the
/// opposite-sign form g - p p / m^2.
enum class PolarizationConvention { metric_consistent, literal };

inline Tensor4 polarization_sum_closed_form(const FourVector& p, double m,
                                            PolarizationConvention conv = PolarizationConvention::metric_consistent) {
  if (!(m > 0.0)) throw ZeroMassError("polarization_sum_closed_form: mass must be positive");
  Tensor4 out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out(a, b) = -metric(a, b) + p.lower(a) * p.lower(b) / (m * m);
  return conv == PolarizationConvention::metric_consistent ? out : Tensor4(-out);
}

/// delta_ij - k_i k_j / k^2.
inline Matrix3 transverse_projector(const Vec3& k) {
  const double k2 = k.squaredNorm();
  if (!(k2 > 0.0)) throw ZeroVectorError("transverse_projector: k must be nonzero");
  return Matrix3::Identity() - k * k.transpose() / k2;
}

}  // namespace qfield
