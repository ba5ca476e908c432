#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qfield/errors.hpp"
#include "qfield/qcore.hpp"

namespace qfield {

using complex = std::complex<double>;

enum class Species : std::uint8_t { particle, antiparticle };
enum class LadderKind : std::uint8_t { annihilate, create };

/// Discrete stand-in for a (momentum, spin) label; delta(rho, rho') becomes a
/// Kronecker delta on ModeLabel.
struct ModeLabel {
  Species species = Species::particle;
  int mode = 0;

  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

struct LadderOp {
  LadderKind kind = LadderKind::annihilate;
  ModeLabel label{};

  bool creates() const { return kind == LadderKind::create; }
  bool annihilates() const { return kind == LadderKind::annihilate; }

  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

inline LadderOp annihilator(Species s = Species::particle, int mode = 0) {
  return {LadderKind::annihilate, {s, mode}};
}
inline LadderOp creator(Species s = Species::particle, int mode = 0) {
  return {LadderKind::create, {s, mode}};
}

/// Ladder operators in product order: ops[0] is leftmost and acts last.
using OperatorString = std::vector<LadderOp>;

struct FockConfig {
  int modes = 4;               // mode indices are in [0, modes)
  int n_max = 16;              // per-mode truncation
  int max_string_length = 12;  // bound on vev / wick inputs
};

/// Text form: lowercase is absorption, uppercase emission, optional mode digits.
/// "a0" = a(0), "A1" = abar(1), "b" = b(0), "B2" = bbar(2).
inline std::string to_string(const LadderOp& op) {
  char c = op.label.species == Species::particle ? 'a' : 'b';
  if (op.creates()) c = static_cast<char>(c - 'a' + 'A');
  return std::string(1, c) + std::to_string(op.label.mode);
}

inline std::string to_string(const OperatorString& s) {
  std::string out;
  for (const auto& op : s) {
    if (!out.empty()) out += ' ';
    out += to_string(op);
  }
  return out;
}

/// Parses whitespace- or comma-separated tokens in the text form above.
inline OperatorString parse_operator_string(std::string_view text) {
  OperatorString out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == ',' || c == '\t') {
      ++i;
      continue;
    }
    LadderOp op;
    switch (c) {
      case 'a': op = annihilator(Species::particle); break;
      case 'A': op = creator(Species::particle); break;
      case 'b': op = annihilator(Species::antiparticle); break;
      case 'B': op = creator(Species::antiparticle); break;
      default:
        throw DomainError(std::string("operator string: unexpected character '") + c + "'");
    }
    ++i;
    int mode = 0;
    bool digits = false;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
      mode = mode * 10 + (text[i] - '0');
      digits = true;
      ++i;
      if (mode > 1000) throw DomainError("operator string: mode index too large");
    }
    op.label.mode = digits ? mode : 0;
    out.push_back(op);
  }
  return out;
}

/// Occupation-number basis state. Zero occupations are not stored, so equal
/// states compare equal regardless of how they were built.
class FockState {
 public:
  FockState() = default;

  int occupation(const ModeLabel& label) const {
    auto it = occ_.find(label);
    return it == occ_.end() ? 0 : it->second;
  }

  FockState with(const ModeLabel& label, int n) const {
    FockState next = *this;
    if (n == 0)
      next.occ_.erase(label);
    else
      next.occ_[label] = n;
    return next;
  }

  bool is_vacuum() const { return occ_.empty(); }
  const std::map<ModeLabel, int>& occupations() const { return occ_; }

  friend bool operator==(const FockState&, const FockState&) = default;
  friend bool operator<(const FockState& l, const FockState& r) { return l.occ_ < r.occ_; }

 private:
  std::map<ModeLabel, int> occ_;
};

/// Complex linear combination of basis states. Amplitudes below 1e-15 in
/// magnitude are dropped; `overflowed()` records that some creation step was
/// cut off by the truncation.
class StateVector {
 public:
  static constexpr double kPruneThreshold = 1e-15;

  StateVector() = default;

  static StateVector vacuum() { return basis(FockState{}); }

  static StateVector basis(const FockState& s, int n_max = FockConfig{}.n_max) {
    StateVector v;
    for (const auto& [label, n] : s.occupations()) {
      if (n > n_max) {
        v.overflow_ = true;
        return v;
      }
    }
    v.terms_.emplace(s, complex{1.0, 0.0});
    return v;
  }

  complex amplitude(const FockState& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? complex{} : it->second;
  }

  const std::map<FockState, complex>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool overflowed() const { return overflow_; }

  StateVector scaled(complex c) const {
    StateVector out;
    out.overflow_ = overflow_;
    for (const auto& [s, amp] : terms_) out.accumulate(s, c * amp);
    return out;
  }

  friend StateVector operator+(const StateVector& l, const StateVector& r) {
    StateVector out = l;
    out.overflow_ = l.overflow_ || r.overflow_;
    for (const auto& [s, amp] : r.terms_) out.accumulate(s, amp);
    return out;
  }

  double max_abs_difference(const StateVector& other) const {
    double d = 0.0;
    for (const auto& [s, amp] : terms_) d = std::max(d, std::abs(amp - other.amplitude(s)));
    for (const auto& [s, amp] : other.terms_) d = std::max(d, std::abs(amp - amplitude(s)));
    return d;
  }

 private:
  template <class Fn>
  friend StateVector transform_terms(const StateVector&, Fn&&);

  void accumulate(const FockState& s, complex amp) {
    auto [it, inserted] = terms_.try_emplace(s, amp);
    if (!inserted) it->second += amp;
    if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
  }

  std::map<FockState, complex> terms_;
  bool overflow_ = false;
};

/// Builds a new vector by mapping each (state, amplitude) to an optional
/// (state', amplitude') pair; the callable may also raise the overflow flag.
template <class Fn>
StateVector transform_terms(const StateVector& v, Fn&& fn) {
  StateVector out;
  out.overflow_ = v.overflow_;
  for (const auto& [s, amp] : v.terms_) {
    FockState next;
    complex next_amp;
    bool overflow = false;
    if (fn(s, amp, next, next_amp, overflow)) out.accumulate(next, next_amp);
    out.overflow_ = out.overflow_ || overflow;
  }
  return out;
}

namespace detail {

inline void check_label(const ModeLabel& label, const FockConfig& cfg) {
  if (label.mode < 0 || label.mode >= cfg.modes) {
    throw DomainError("mode index " + std::to_string(label.mode) + " outside [0, " +
                      std::to_string(cfg.modes) + ")");
  }
}

// sqrt(<n>_q); tiny negative rounding at q = -1 is clamped to zero.
inline double ladder_coefficient(QParam q, int n) {
  double bn = basic_number(q, n);
  if (bn < 0.0) {
    if (bn > -1e-14) return 0.0;
    throw NegativeNormError("<" + std::to_string(n) + ">_q = " + std::to_string(bn) +
                            " < 0 at q = " + std::to_string(q.q));
  }
  return std::sqrt(bn);
}

}  // namespace detail

/// a|n> = sqrt(<n>_q)|n-1>, abar|n> = sqrt(<n+1>_q)|n+1>, so that
/// a abar - q abar a = 1 on every representable state.
inline StateVector apply_ladder(const LadderOp& op, const StateVector& v, QParam q,
                                const FockConfig& cfg = {}) {
  detail::check_label(op.label, cfg);
  return transform_terms(v, [&](const FockState& s, complex amp, FockState& next,
                                complex& next_amp, bool& overflow) {
    const int n = s.occupation(op.label);
    if (op.annihilates()) {
      if (n == 0) return false;
      next = s.with(op.label, n - 1);
      next_amp = amp * detail::ladder_coefficient(q, n);
      return true;
    }
    if (n + 1 > cfg.n_max) {
      overflow = true;
      return false;
    }
    next = s.with(op.label, n + 1);
    next_amp = amp * detail::ladder_coefficient(q, n + 1);
    return true;
  });
}

/// Applies a product of operators: the rightmost acts first.
inline StateVector apply_string(const OperatorString& ops, const StateVector& v, QParam q,
                                const FockConfig& cfg = {}) {
  StateVector out = v;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    out = apply_ladder(*it, out, q, cfg);
    if (out.empty()) break;
  }
  return out;
}

/// Brute-force <0| ops |0> by explicit ladder action on the truncated space.
inline complex vev(const OperatorString& ops, QParam q, const FockConfig& cfg = {}) {
  if (static_cast<int>(ops.size()) > cfg.max_string_length) {
    throw LengthBoundError("operator string of length " + std::to_string(ops.size()) +
                           " exceeds bound " + std::to_string(cfg.max_string_length));
  }
  return apply_string(ops, StateVector::vacuum(), q, cfg).amplitude(FockState{});
}

// ---------------------------------------------------------------------------
// Charge conjugation: C abar C^-1 = eps* bbar, C a C^-1 = eps b, C Psi_0 = Psi_0.
// Taking C to be an involution fixes C bbar C^-1 = eps abar and C b C^-1 = eps* a.

struct PhasedOp {
  complex phase;
  LadderOp op;
};

inline PhasedOp charge_conjugate(const LadderOp& op, complex eps = {1.0, 0.0}) {
  if (std::abs(std::abs(eps) - 1.0) > 1e-12) throw DomainError("charge conjugation phase must have |eps| = 1");
  LadderOp out = op;
  const bool particle = op.label.species == Species::particle;
  out.label.species = particle ? Species::antiparticle : Species::particle;
  // particle creators pick up eps*, particle annihilators eps; antiparticles the reverse
  const bool conj = particle == op.creates();
  return {conj ? std::conj(eps) : eps, out};
}

/// Swaps particle and antiparticle occupations; a state with N_a particles and
/// N_b antiparticles acquires eps*^N_a eps^N_b. C applied twice is the identity.
inline StateVector charge_conjugate(const StateVector& v, complex eps = {1.0, 0.0}) {
  if (std::abs(std::abs(eps) - 1.0) > 1e-12) throw DomainError("charge conjugation phase must have |eps| = 1");
  return transform_terms(v, [&](const FockState& s, complex amp, FockState& next, complex& next_amp,
                                bool&) {
    complex phase{1.0, 0.0};
    next = FockState{};
    for (const auto& [label, n] : s.occupations()) {
      ModeLabel swapped = label;
      const bool particle = label.species == Species::particle;
      swapped.species = particle ? Species::antiparticle : Species::particle;
      next = next.with(swapped, n);
      phase *= std::pow(particle ? std::conj(eps) : eps, n);
    }
    next_amp = amp * phase;
    return true;
  });
}

/// Termwise conjugation of an operator string: returns the accumulated phase
/// and the relabelled string.
inline std::pair<complex, OperatorString> charge_conjugate(const OperatorString& ops,
                                                           complex eps = {1.0, 0.0}) {
  complex phase{1.0, 0.0};
  OperatorString out;
  out.reserve(ops.size());
  for (const auto& op : ops) {
    auto [p, c] = charge_conjugate(op, eps);
    phase *= p;
    out.push_back(c);
  }
  return {phase, out};
}

}  // namespace qfield
