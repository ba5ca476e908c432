#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfield/errors.hpp"
#include "qfield/fock.hpp"
#include "qfield/qcore.hpp"

namespace qfield {

// ---------------------------------------------------------------------------
// Normal forms

/// One normal-ordered term. `q_power` is set when the coefficient is exactly
/// q^k (a single rewrite path); merged terms lose it.
struct NormalTerm {
  complex coefficient;
  std::optional<int> q_power;
  OperatorString ops;
};

/// Sum of normal-ordered strings, canonical and sorted by string. An empty
/// string is the identity.
class NormalForm {
 public:
  NormalForm() = default;

  const std::vector<NormalTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of the identity, i.e. the vacuum expectation value.
  complex vacuum_value() const {
    for (const auto& t : terms_)
      if (t.ops.empty()) return t.coefficient;
    return {};
  }

  complex coefficient(const OperatorString& canonical_ops) const {
    for (const auto& t : terms_)
      if (t.ops == canonical_ops) return t.coefficient;
    return {};
  }

  double max_abs_difference(const NormalForm& other) const {
    double d = 0.0;
    for (const auto& t : terms_) d = std::max(d, std::abs(t.coefficient - other.coefficient(t.ops)));
    for (const auto& t : other.terms_) d = std::max(d, std::abs(t.coefficient - coefficient(t.ops)));
    return d;
  }

  /// Applies the normal form as an operator on a state.
  StateVector apply(const StateVector& v, QParam q, const FockConfig& cfg = {}) const {
    StateVector out;
    for (const auto& t : terms_) out = out + apply_string(t.ops, v, q, cfg).scaled(t.coefficient);
    return out;
  }

  class Builder;

 private:
  std::vector<NormalTerm> terms_;
};

inline bool is_normal_ordered(const OperatorString& s) {
  bool seen_annihilator = false;
  for (const auto& op : s) {
    if (op.annihilates()) seen_annihilator = true;
    else if (seen_annihilator) return false;
  }
  return true;
}

/// Creators stably sorted by label, then annihilators likewise. Distinct
/// labels commute exactly, so this does not change the operator.
inline OperatorString canonical_normal_string(const OperatorString& s) {
  OperatorString creators;
  OperatorString annihilators;
  for (const auto& op : s) (op.creates() ? creators : annihilators).push_back(op);
  auto by_label = [](const LadderOp& l, const LadderOp& r) { return l.label < r.label; };
  std::stable_sort(creators.begin(), creators.end(), by_label);
  std::stable_sort(annihilators.begin(), annihilators.end(), by_label);
  creators.insert(creators.end(), annihilators.begin(), annihilators.end());
  return creators;
}

class NormalForm::Builder {
 public:
  void add(const OperatorString& normal_ops, complex coefficient, std::optional<int> q_power) {
    auto key = canonical_normal_string(normal_ops);
    auto [it, inserted] = acc_.try_emplace(std::move(key), Entry{coefficient, q_power});
    if (!inserted) {
      it->second.coefficient += coefficient;
      it->second.q_power.reset();
    }
  }

  /// Drops terms whose coefficient is exactly zero.
  NormalForm build() && {
    NormalForm nf;
    for (auto& [ops, e] : acc_) {
      if (e.coefficient == complex{}) continue;
      nf.terms_.push_back({e.coefficient, e.q_power, ops});
    }
    return nf;
  }

 private:
  struct Entry {
    complex coefficient;
    std::optional<int> q_power;
  };
  std::map<OperatorString, Entry> acc_;
};

namespace detail {
inline void check_length(const OperatorString& s, const FockConfig& cfg) {
  if (static_cast<int>(s.size()) > cfg.max_string_length) {
    throw LengthBoundError("operator string of length " + std::to_string(s.size()) +
                           " exceeds bound " + std::to_string(cfg.max_string_length));
  }
}
}  // namespace detail

/// Normal ordering by exhaustive rewriting of the leftmost a(r) abar(r') pair:
///   a(r) abar(r') -> q abar(r') a(r) + delta(r, r')   (same label)
///   a(r) abar(r') -> abar(r') a(r)                      (distinct labels)
/// Each rewrite removes an inversion or shortens the string, so this terminates.
inline NormalForm normal_order(const OperatorString& s, QParam q, const FockConfig& cfg = {}) {
  detail::check_length(s, cfg);
  struct Pending {
    complex coefficient;
    std::optional<int> q_power;
  };
  std::map<OperatorString, Pending> work;
  work.emplace(s, Pending{{1.0, 0.0}, 0});
  NormalForm::Builder out;

  auto push = [&work](OperatorString ops, complex c, std::optional<int> p) {
    auto [it, inserted] = work.try_emplace(std::move(ops), Pending{c, p});
    if (!inserted) {
      it->second.coefficient += c;
      it->second.q_power.reset();
    }
  };

  while (!work.empty()) {
    auto node = work.extract(work.begin());
    OperatorString ops = std::move(node.key());
    const Pending cur = node.mapped();

    std::size_t i = 0;
    while (i + 1 < ops.size() && !(ops[i].annihilates() && ops[i + 1].creates())) ++i;
    if (i + 1 >= ops.size()) {
      out.add(ops, cur.coefficient, cur.q_power);
      continue;
    }

    OperatorString swapped = ops;
    std::swap(swapped[i], swapped[i + 1]);
    if (ops[i].label == ops[i + 1].label) {
      push(std::move(swapped), cur.coefficient * q.q,
           cur.q_power ? std::optional<int>(*cur.q_power + 1) : std::nullopt);
      OperatorString contracted;
      contracted.reserve(ops.size() - 2);
      contracted.insert(contracted.end(), ops.begin(), ops.begin() + static_cast<long>(i));
      contracted.insert(contracted.end(), ops.begin() + static_cast<long>(i) + 2, ops.end());
      push(std::move(contracted), cur.coefficient, cur.q_power);
    } else {
      push(std::move(swapped), cur.coefficient, cur.q_power);
    }
  }
  return std::move(out).build();
}

// ---------------------------------------------------------------------------
// Pairing diagrams

/// A (possibly partial) pairing of an operator string. Indices are 0-based
/// positions. Only same-label (annihilator, creator) positions are paired.
///
/// `crossings` counts interleaved same-label pairs i < k < j < l. The q-power of
/// the diagram also counts `open_crossings`: unpaired operators are drawn as
/// legs running to the left (creators) or right (annihilators) boundary, and
/// each same-label leg that crosses an arc or another leg adds one.
struct PairingDiagram {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> unpaired;
  int crossings = 0;
  int open_crossings = 0;

  int q_power() const { return crossings + open_crossings; }
  bool is_full_contraction() const { return unpaired.empty(); }
};

struct WickTerm {
  PairingDiagram diagram;
  /// Product of pairing values <a abar> = 1 (annihilator first) or 0.
  double pair_value = 1.0;
  complex coefficient;
  /// Unpaired operators in normal order (creators, then annihilators, each in
  /// original relative order).
  OperatorString remainder;
};

namespace detail {

inline void finish_diagram(const OperatorString& s, PairingDiagram& d) {
  d.crossings = 0;
  d.open_crossings = 0;
  const auto& p = d.pairs;
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (std::size_t y = x + 1; y < p.size(); ++y) {
      if (s[p[x].first].label != s[p[y].first].label) continue;
      auto [i, j] = p[x];
      auto [k, l] = p[y];
      if ((i < k && k < j && j < l) || (k < i && i < l && l < j)) ++d.crossings;
    }
  }
  for (const auto& [i, j] : p)
    for (int u : d.unpaired)
      if (s[u].label == s[i].label && i < u && u < j) ++d.open_crossings;
  for (std::size_t x = 0; x < d.unpaired.size(); ++x)
    for (std::size_t y = x + 1; y < d.unpaired.size(); ++y) {
      const auto& l = s[d.unpaired[x]];
      const auto& r = s[d.unpaired[y]];
      if (l.label == r.label && l.annihilates() && r.creates()) ++d.open_crossings;
    }
}

inline void enumerate_pairings(const OperatorString& s, std::vector<char>& used, int start,
                               PairingDiagram& current, std::vector<PairingDiagram>& out) {
  const int n = static_cast<int>(s.size());
  int i = start;
  while (i < n && used[i]) ++i;
  if (i >= n) {
    // used: 1 = paired, 2 = deliberately left unpaired
    PairingDiagram d = current;
    for (int u = 0; u < n; ++u)
      if (used[u] == 2) d.unpaired.push_back(u);
    out.push_back(std::move(d));
    return;
  }
  // i left unpaired
  used[i] = 2;
  enumerate_pairings(s, used, i + 1, current, out);
  used[i] = 0;
  // i paired with a later partner of the same label and opposite kind
  for (int j = i + 1; j < n; ++j) {
    if (used[j] || s[j].label != s[i].label || s[j].kind == s[i].kind) continue;
    used[i] = used[j] = 1;
    current.pairs.emplace_back(i, j);
    enumerate_pairings(s, used, i + 1, current, out);
    current.pairs.pop_back();
    used[i] = used[j] = 0;
  }
}

}  // namespace detail

/// Enumerates every pairing diagram (including no pairings) in a fixed
/// lexicographic order. Coefficient = pair_value * q^(crossings + open_crossings).
inline std::vector<WickTerm> wick_expand(const OperatorString& s, QParam q, const FockConfig& cfg = {}) {
  detail::check_length(s, cfg);
  std::vector<PairingDiagram> diagrams;
  std::vector<char> used(s.size(), 0);
  PairingDiagram current;
  detail::enumerate_pairings(s, used, 0, current, diagrams);

  std::vector<WickTerm> out;
  out.reserve(diagrams.size());
  for (auto& d : diagrams) {
    detail::finish_diagram(s, d);
    WickTerm t;
    for (auto [i, j] : d.pairs)
      if (!s[i].annihilates()) t.pair_value = 0.0;
    t.coefficient = t.pair_value * std::pow(q.q, d.q_power());
    for (int u : d.unpaired)
      if (s[u].creates()) t.remainder.push_back(s[u]);
    for (int u : d.unpaired)
      if (s[u].annihilates()) t.remainder.push_back(s[u]);
    t.diagram = std::move(d);
    out.push_back(std::move(t));
  }
  return out;
}

/// Sum over full contractions, accumulated in diagram order.
inline complex wick_vev(const std::vector<WickTerm>& terms) {
  complex sum{};
  for (const auto& t : terms)
    if (t.diagram.is_full_contraction()) sum += t.coefficient;
  return sum;
}

inline complex wick_vev(const OperatorString& s, QParam q, const FockConfig& cfg = {}) {
  return wick_vev(wick_expand(s, q, cfg));
}

/// Collects the diagram expansion into a normal form.
inline NormalForm wick_normal_form(const OperatorString& s, QParam q, const FockConfig& cfg = {}) {
  NormalForm::Builder b;
  for (const auto& t : wick_expand(s, q, cfg)) {
    if (t.pair_value == 0.0) continue;
    b.add(t.remainder, t.coefficient, t.diagram.q_power());
  }
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// Oracle harness

struct WickReport {
  OperatorString ops;
  double q = 1.0;
  complex wick_vev;
  complex fock_vev;
  complex normal_order_vev;
  double abs_diff = 0.0;  // max over both routes against the Fock value
  bool pass = true;
};

inline constexpr double kWickRelativeTolerance = 1e-9;

/// Compares the diagram sum and the rewrite route against brute-force ladder
/// action. A mismatch is reported, not thrown.
inline WickReport verify_wick(const OperatorString& s, QParam q, const FockConfig& cfg = {}) {
  WickReport r;
  r.ops = s;
  r.q = q.q;
  FockConfig fock_cfg = cfg;
  fock_cfg.n_max = std::max(cfg.n_max, static_cast<int>(s.size()));
  r.fock_vev = vev(s, q, fock_cfg);
  r.wick_vev = wick_vev(s, q, cfg);
  r.normal_order_vev = normal_order(s, q, cfg).vacuum_value();
  r.abs_diff = std::max(std::abs(r.wick_vev - r.fock_vev), std::abs(r.normal_order_vev - r.fock_vev));
  r.pass = r.abs_diff <= kWickRelativeTolerance * std::max(1.0, std::abs(r.fock_vev));
  return r;
}

/// All strings of the given length over the given labels, both kinds per
/// label, in lexicographic order of (label index, kind).
inline std::vector<OperatorString> enumerate_strings(int length, const std::vector<ModeLabel>& labels) {
  std::vector<LadderOp> alphabet;
  for (const auto& l : labels) {
    alphabet.push_back({LadderKind::annihilate, l});
    alphabet.push_back({LadderKind::create, l});
  }
  std::vector<OperatorString> out;
  if (length == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(length), 0);
  while (true) {
    OperatorString s;
    for (auto k : idx) s.push_back(alphabet[k]);
    out.push_back(std::move(s));
    int pos = length - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == alphabet.size()) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

struct WickSweepSummary {
  double q = 1.0;
  int modes = 1;
  int max_length = 0;
  std::size_t strings = 0;
  std::size_t failures = 0;
  double max_abs_diff = 0.0;
  std::vector<WickReport> failed;
};

inline WickSweepSummary verify_wick_sweep(int max_length, int modes, QParam q, const FockConfig& cfg = {}) {
  std::vector<ModeLabel> labels;
  for (int m = 0; m < modes; ++m) labels.push_back({Species::particle, m});
  WickSweepSummary sum;
  sum.q = q.q;
  sum.modes = modes;
  sum.max_length = max_length;
  for (int len = 0; len <= max_length; ++len) {
    for (const auto& s : enumerate_strings(len, labels)) {
      auto r = verify_wick(s, q, cfg);
      ++sum.strings;
      sum.max_abs_diff = std::max(sum.max_abs_diff, r.abs_diff);
      if (!r.pass) {
        ++sum.failures;
        sum.failed.push_back(std::move(r));
      }
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// q-time ordering

/// Linear combination of operator strings; used for field factors such as
/// psi = a + bbar.
class OperatorSum {
 public:
  OperatorSum() = default;
  OperatorSum(OperatorString s) { terms_.push_back({{1.0, 0.0}, std::move(s)}); }  // NOLINT
  OperatorSum(LadderOp op) : OperatorSum(OperatorString{op}) {}                    // NOLINT

  struct Term {
    complex coefficient;
    OperatorString ops;
  };

  const std::vector<Term>& terms() const { return terms_; }

  friend OperatorSum operator+(OperatorSum l, const OperatorSum& r) {
    l.terms_.insert(l.terms_.end(), r.terms_.begin(), r.terms_.end());
    return l;
  }
  friend OperatorSum operator*(complex c, OperatorSum s) {
    for (auto& t : s.terms_) t.coefficient *= c;
    return s;
  }
  friend OperatorSum operator*(const OperatorSum& l, const OperatorSum& r) {
    OperatorSum out;
    for (const auto& a : l.terms_)
      for (const auto& b : r.terms_) {
        OperatorString ops = a.ops;
        ops.insert(ops.end(), b.ops.begin(), b.ops.end());
        out.terms_.push_back({a.coefficient * b.coefficient, std::move(ops)});
      }
    return out;
  }

 private:
  std::vector<Term> terms_;
};

using FieldTerm = OperatorSum;

inline NormalForm normal_order(const OperatorSum& sum, QParam q, const FockConfig& cfg = {}) {
  NormalForm::Builder b;
  for (const auto& t : sum.terms()) {
    const NormalForm nf = normal_order(t.ops, q, cfg);
    for (const auto& nt : nf.terms())
      b.add(nt.ops, t.coefficient * nt.coefficient, std::nullopt);
  }
  return std::move(b).build();
}

inline complex vev(const OperatorSum& sum, QParam q, const FockConfig& cfg = {}) {
  complex out{};
  for (const auto& t : sum.terms()) out += t.coefficient * vev(t.ops, q, cfg);
  return out;
}

/// T_q(f1 f2): f1 f2 for t1 > t2, q f2 f1 for t1 < t2.
struct TimeOrderedProduct {
  double factor = 1.0;
  bool swapped = false;
  FieldTerm left;
  FieldTerm right;

  OperatorSum product() const { return complex{factor, 0.0} * (left * right); }
};

inline TimeOrderedProduct q_time_order(const FieldTerm& f1, const FieldTerm& f2, double t1, double t2, QParam q) {
  if (t1 == t2) throw EqualTimeError("q-time ordering is undefined at equal times");
  if (t1 > t2) return {1.0, false, f1, f2};
  return {q.q, true, f2, f1};
}

/// The same product written as (1/2)[{f1,f2}_q + eps(t1-t2) (f1,f2)_q] with
/// {A,B}_q = AB + qBA and (A,B)_q = AB - qBA.
inline OperatorSum q_time_order_half_sum(const FieldTerm& f1, const FieldTerm& f2, double t1, double t2,
                                         QParam q) {
  if (t1 == t2) throw EqualTimeError("q-time ordering is undefined at equal times");
  const double eps = t1 > t2 ? 1.0 : -1.0;
  const OperatorSum ab = f1 * f2;
  const OperatorSum ba = f2 * f1;
  const OperatorSum anti = ab + complex{q.q, 0.0} * ba;
  const OperatorSum comm = ab + complex{-q.q, 0.0} * ba;
  return complex{0.5, 0.0} * (anti + complex{eps, 0.0} * comm);
}

/// q-chronological pairing <0|T_q(f1 f2)|0>, evaluated through the diagram sum.
inline complex chronological_pairing(const FieldTerm& f1, const FieldTerm& f2, double t1, double t2, QParam q,
                                     const FockConfig& cfg = {}) {
  const auto ordered = q_time_order(f1, f2, t1, t2, q);
  complex out{};
  const OperatorSum product = ordered.product();
  for (const auto& t : product.terms()) out += t.coefficient * wick_vev(t.ops, q, cfg);
  return out;
}

}  // namespace qfield
