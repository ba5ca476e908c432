#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qfield/dirac.hpp"
#include "qfield/errors.hpp"
#include "qfield/kinematics.hpp"
#include "qfield/qcore.hpp"

namespace qfield {

/// Two-to-two kinematics: (A, B) -> (C, D). Legs are stored in the order
/// A, B, C, D for `masses`.
struct ProcessKinematics {
  std::array<FourVector, 2> incoming;
  std::array<FourVector, 2> outgoing;
  std::array<double, 4> masses{};

  const FourVector& leg(int i) const { return i < 2 ? incoming[static_cast<std::size_t>(i)] : outgoing[static_cast<std::size_t>(i - 2)]; }

  /// Throws KinematicsError unless every leg is on shell and four-momentum is
  /// conserved, both to 1e-10 relative.
  void validate() const {
    double scale = 1.0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(leg(i).energy()));
    for (int i = 0; i < 4; ++i) {
      const double m = masses[static_cast<std::size_t>(i)];
      if (!(leg(i).energy() > 0.0)) throw KinematicsError("leg " + std::to_string(i) + " has non-positive energy");
      if (std::abs(leg(i).square() - m * m) > 1e-10 * scale * scale) {
        throw KinematicsError("leg " + std::to_string(i) + " is off shell");
      }
    }
    const FourVector balance = incoming[0] + incoming[1] - outgoing[0] - outgoing[1];
    for (int mu = 0; mu < 4; ++mu) {
      if (std::abs(balance[mu]) > 1e-10 * scale) throw KinematicsError("four-momentum is not conserved");
    }
  }
};

/// Elastic e e -> e e in the centre-of-mass frame: beams along z with |p|,
/// outgoing C at polar angle theta and azimuth phi, D opposite.
inline ProcessKinematics moller_cm_kinematics(double m, double p, double theta, double phi = 0.0) {
  const double e = std::sqrt(p * p + m * m);
  const Vec3 dir(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  ProcessKinematics k;
  k.incoming = {FourVector(e, 0.0, 0.0, p), FourVector(e, 0.0, 0.0, -p)};
  k.outgoing = {FourVector(e, p * dir), FourVector(e, -p * dir)};
  k.masses = {m, m, m, m};
  k.validate();
  return k;
}

/// e+ e- -> gamma gamma in the centre-of-mass frame: e+ along +z, photon 1 at
/// polar angle theta in the x-z plane. Each photon carries the beam energy.
inline ProcessKinematics annihilation_cm_kinematics(double m, double p, double theta) {
  const double e = std::sqrt(p * p + m * m);
  const Vec3 dir(std::sin(theta), 0.0, std::cos(theta));
  ProcessKinematics k;
  k.incoming = {FourVector(e, 0.0, 0.0, p), FourVector(e, 0.0, 0.0, -p)};
  k.outgoing = {FourVector(e, e * dir), FourVector(e, -e * dir)};
  k.masses = {m, m, 0.0, 0.0};
  k.validate();
  return k;
}

inline ProcessKinematics boosted(const ProcessKinematics& kin, const Boost& b) {
  ProcessKinematics out = kin;
  for (auto& p : out.incoming) p = boost(p, b);
  for (auto& p : out.outgoing) p = boost(p, b);
  return out;
}

enum class LineFlavor { photon_line, electron_line };

inline constexpr double kDegenerateTransfer = 1e-12;

/// Internal-line correction factor in the working frame, with
/// R = (E_in - E_out)/|p_in - p_out|:
///   photon_line:   (1/2)[(1+q) + (1-q) R]
///   electron_line: (1/2)[(1-q) + (1+q) R]
inline double correction_factor(double e_in, double e_out, const Vec3& p_in, const Vec3& p_out, QParam q,
                                LineFlavor flavor) {
  // transfers at rounding level of the momentum scale count as zero
  const double scale = std::max({std::abs(e_in), std::abs(e_out), p_in.norm(), p_out.norm()});
  const double transfer = (p_in - p_out).norm();
  if (!(transfer > kDegenerateTransfer * scale)) {
    throw DegenerateTransferError("correction factor: zero three-momentum transfer");
  }
  const double ratio = (e_in - e_out) / transfer;
  if (flavor == LineFlavor::photon_line) return 0.5 * ((1.0 + q.q) + (1.0 - q.q) * ratio);
  return 0.5 * ((1.0 - q.q) + (1.0 + q.q) * ratio);
}

inline double correction_factor(const FourVector& in, const FourVector& out, QParam q, LineFlavor flavor) {
  return correction_factor(in.energy(), out.energy(), in.spatial(), out.spatial(), q, flavor);
}

/// u-bar_out gamma^mu u_in.
inline std::complex<double> current_matrix_element(const DiracSpinor& out, const DiracSpinor& in, int mu) {
  return (dirac_adjoint(out.components) * gamma(mu) * in.components)(0, 0);
}

using Current = std::array<std::complex<double>, 4>;

inline Current current(const DiracSpinor& out, const DiracSpinor& in) {
  Current j;
  for (int mu = 0; mu < 4; ++mu) j[static_cast<std::size_t>(mu)] = current_matrix_element(out, in, mu);
  return j;
}

/// J1^mu J2_mu.
inline std::complex<double> contract(const Current& a, const Current& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

/// k_mu J^mu.
inline std::complex<double> contract(const FourVector& k, const Current& j) {
  return k[0] * j[0] - k[1] * j[1] - k[2] * j[2] - k[3] * j[3];
}

struct MollerOptions {
  /// Use |P_B - P_A|^2 literally as the exchange-diagram denominator instead
  /// of the momentum transfer |P_D - P_A|^2.
  bool strict_paper_mode = false;
};

struct MollerAmplitude {
  std::complex<double> value;     // q [direct - exchange]
  std::complex<double> direct;    // J_CA . J_DB F_CA / t_CA
  std::complex<double> exchange;  // J_DA . J_CB F_DA / t_DA
  double f_ca = 1.0;
  double f_da = 1.0;
  double t_ca = 0.0;
  double t_da = 0.0;
};

/// Final-state-antisymmetrized tree amplitude with q-corrected photon
/// exchange, up to the overall coupling. Transfers are squared
/// four-momenta.
inline MollerAmplitude moller_amplitude(const ProcessKinematics& kin, const std::array<int, 4>& spins, QParam q,
                                        const MollerOptions& opt = {}) {
  kin.validate();
  const auto& pa = kin.incoming[0];
  const auto& pb = kin.incoming[1];
  const auto& pc = kin.outgoing[0];
  const auto& pd = kin.outgoing[1];
  const auto ua = u_spinor(pa, spins[0], kin.masses[0]);
  const auto ub = u_spinor(pb, spins[1], kin.masses[1]);
  const auto uc = u_spinor(pc, spins[2], kin.masses[2]);
  const auto ud = u_spinor(pd, spins[3], kin.masses[3]);

  MollerAmplitude m;
  m.t_ca = (pc - pa).square();
  m.t_da = opt.strict_paper_mode ? (pb - pa).square() : (pd - pa).square();
  if (m.t_ca == 0.0 || m.t_da == 0.0) throw DegenerateTransferError("Moller amplitude: vanishing momentum transfer");
  m.f_ca = correction_factor(pa, pc, q, LineFlavor::photon_line);
  m.f_da = correction_factor(pa, pd, q, LineFlavor::photon_line);
  m.direct = contract(current(uc, ua), current(ud, ub)) * (m.f_ca / m.t_ca);
  m.exchange = contract(current(ud, ua), current(uc, ub)) * (m.f_da / m.t_da);
  m.value = q.q * (m.direct - m.exchange);
  return m;
}

/// Sum of |M|^2 over the 16 spin assignments. No phase-space integration.
inline double moller_spin_summed_squared(const ProcessKinematics& kin, QParam q, const MollerOptions& opt = {}) {
  double total = 0.0;
  for (int ra = 1; ra <= 2; ++ra)
    for (int rb = 1; rb <= 2; ++rb)
      for (int rc = 1; rc <= 2; ++rc)
        for (int rd = 1; rd <= 2; ++rd) total += std::norm(moller_amplitude(kin, {ra, rb, rc, rd}, q, opt).value);
  return total;
}

/// Coefficients of q(1 + q P_AB)(1 + q P_CD) on the four permuted current
/// products.
struct ExchangeWeights {
  double identity = 0.0;
  double swap_ab = 0.0;
  double swap_cd = 0.0;
  double swap_both = 0.0;
  friend bool operator==(const ExchangeWeights&, const ExchangeWeights&) = default;
};

inline ExchangeWeights exchange_weights(QParam q) {
  return {q.q, q.q * q.q, q.q * q.q, q.q * q.q * q.q};
}

struct CorrectionPair {
  double first = 1.0;
  double second = 1.0;
};

/// Electron-line correction factors for e+(p+) e-(p-) -> gamma(k1) gamma(k2),
/// one per internal-electron diagram: (E+, eps_1, p+, k1) and (E+, eps_2, p+, k2).
inline CorrectionPair annihilation_correction_pair(const ProcessKinematics& kin, QParam q) {
  kin.validate();
  if (kin.masses[2] != 0.0 || kin.masses[3] != 0.0) throw KinematicsError("annihilation: photons must be massless");
  const auto& positron = kin.incoming[0];
  return {correction_factor(positron, kin.outgoing[0], q, LineFlavor::electron_line),
          correction_factor(positron, kin.outgoing[1], q, LineFlavor::electron_line)};
}

enum class Process { moller, annihilation };

struct FrameRow {
  Vec3 beta;
  double first = 0.0;   // F_CA or F_{e+ k1}
  double second = 0.0;  // F_DA or F_{e+ k2}
};

/// Correction factors re-evaluated after boosting every leg by each beta, in
/// input order.
inline std::vector<FrameRow> frame_scan(const ProcessKinematics& kin, QParam q, const std::vector<Boost>& betas,
                                        Process process) {
  kin.validate();
  std::vector<FrameRow> rows;
  rows.reserve(betas.size());
  for (const auto& b : betas) {
    const auto k = boosted(kin, b);
    FrameRow row;
    row.beta = b.beta();
    if (process == Process::moller) {
      row.first = correction_factor(k.incoming[0], k.outgoing[0], q, LineFlavor::photon_line);
      row.second = correction_factor(k.incoming[0], k.outgoing[1], q, LineFlavor::photon_line);
    } else {
      const auto pair = annihilation_correction_pair(k, q);
      row.first = pair.first;
      row.second = pair.second;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Largest (max - min) over the scan, taken per factor column.
inline double frame_spread(const std::vector<FrameRow>& rows) {
  if (rows.empty()) return 0.0;
  double lo1 = rows.front().first, hi1 = lo1;
  double lo2 = rows.front().second, hi2 = lo2;
  for (const auto& r : rows) {
    lo1 = std::min(lo1, r.first);
    hi1 = std::max(hi1, r.first);
    lo2 = std::min(lo2, r.second);
    hi2 = std::max(hi2, r.second);
  }
  return std::max(hi1 - lo1, hi2 - lo2);
}

}  // namespace qfield
