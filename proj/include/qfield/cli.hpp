#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qfield/dirac.hpp"
#include "qfield/errors.hpp"
#include "qfield/fock.hpp"
#include "qfield/propagator.hpp"
#include "qfield/qcore.hpp"
#include "qfield/scattering.hpp"
#include "qfield/wick.hpp"

namespace qfield::cli {

/// Invalid flags or values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::string, double, long long>;

/// Floats with 17 significant digits, so output round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw std::logic_error("table row width mismatch");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::string to_csv() const {
    std::string out = join(header_) + "\n";
    for (const auto& row : rows_) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(render(c));
      out += join(cells) + "\n";
    }
    return out;
  }

  std::string to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit([&](const auto& v) { obj[header_[i]] = v; }, row[i]);
      }
      arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
  }

 private:
  static std::string render(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    return quoted + "\"";
  }

  static std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    return out;
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

// ---------------------------------------------------------------------------
// Flag parsing helpers

inline double parse_number(const std::string& flag, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError(flag + ": not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw UsageError(flag + ": not a finite number: '" + text + "'");
  return v;
}

/// "v" or "start:stop:count" (count >= 1, endpoints inclusive).
inline std::vector<double> parse_grid(const std::string& flag, const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) return {parse_number(flag, text)};
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) throw UsageError(flag + ": grid must be start:stop:count");
  const double a = parse_number(flag, text.substr(0, first));
  const double b = parse_number(flag, text.substr(first + 1, second - first - 1));
  const double n_real = parse_number(flag, text.substr(second + 1));
  if (n_real < 1 || n_real != std::floor(n_real) || n_real > 1e6) throw UsageError(flag + ": grid count must be a positive integer");
  const auto n = static_cast<int>(n_real);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

inline std::vector<double> parse_list(const std::string& flag, const std::string& text, std::size_t expected) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(flag, item));
  if (out.size() != expected) {
    throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

inline Vec3 parse_vec3(const std::string& flag, const std::string& text) {
  const auto v = parse_list(flag, text, 3);
  return {v[0], v[1], v[2]};
}

inline OperatorString parse_ops(const std::string& text, const FockConfig& cfg) {
  OperatorString ops;
  try {
    ops = parse_operator_string(text);
  } catch (const DomainError& e) {
    throw UsageError(std::string("--ops: ") + e.what());
  }
  for (const auto& op : ops) {
    if (op.label.mode >= cfg.modes) throw UsageError("--ops: mode index outside [0, --modes)");
  }
  if (static_cast<int>(ops.size()) > cfg.max_string_length) throw UsageError("--ops: string longer than --max-len");
  return ops;
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

/// 64-bit FNV-1a, used to key golden files by their flags.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string golden_root() {
  if (const char* env = std::getenv("QFIELD_GOLDEN_DIR"); env && *env) return env;
  return "golden";
}

// ---------------------------------------------------------------------------
// Runner

struct RunConfig {
  std::string format = "csv";
  std::string out_path;
  std::string golden;  // "", "write" or "check"
  bool strict_paper_mode = false;

  double q = 1.0;
  double m = 1.0;
  int n = 0;
  double x = 0.0;
  std::string ops;
  int n_max = FockConfig{}.n_max;
  int modes = FockConfig{}.modes;
  int max_len = FockConfig{}.max_string_length;

  std::string k0 = "0";
  std::string kvec = "0,0,0";
  std::string t = "1";
  std::string r = "1";
  std::string form = "metric";
  std::string p3 = "0,0,1";
  double rel_tol = 1e-8;
  int sweep_modes = 1;

  double p = 1.0;
  double theta = 1.0471975511965976;  // 60 degrees
  double phi = 0.0;
  std::string beta = "0,0,0";
  std::string spins = "1,1,1,1";
  std::string process = "moller";
  std::string axis = "z";
  std::string betas = "-0.9:0.9:19";
  bool all = false;
};

namespace detail {

inline FockConfig fock_config(const RunConfig& c) {
  require(c.modes >= 1 && c.modes <= 64, "--modes must be in [1, 64]");
  require(c.n_max >= 1 && c.n_max <= 256, "--n-max must be in [1, 256]");
  require(c.max_len >= 0 && c.max_len <= 16, "--max-len must be in [0, 16]");
  FockConfig f;
  f.modes = c.modes;
  f.n_max = c.n_max;
  f.max_string_length = c.max_len;
  return f;
}

inline void add_complex(std::vector<Cell>& row, std::complex<double> z) {
  row.emplace_back(z.real());
  row.emplace_back(z.imag());
}

inline std::string diagram_pairs(const PairingDiagram& d) {
  std::string s;
  for (auto [i, j] : d.pairs) s += "(" + std::to_string(i + 1) + " " + std::to_string(j + 1) + ")";
  return s;
}

inline std::string diagram_unpaired(const PairingDiagram& d) {
  std::string s;
  for (int u : d.unpaired) {
    if (!s.empty()) s += ' ';
    s += std::to_string(u + 1);
  }
  return s;
}

inline std::string string_or_identity(const OperatorString& s) { return s.empty() ? "1" : to_string(s); }

inline int axis_index(const std::string& axis) {
  if (axis == "x") return 0;
  if (axis == "y") return 1;
  if (axis == "z") return 2;
  throw UsageError("--axis must be x, y or z");
}

inline double mass_flag(const RunConfig& c) {
  require(c.m >= 0.0 && std::isfinite(c.m), "--m must be finite and >= 0");
  return c.m;
}

inline Boost boost_flag(const std::string& text) {
  const Vec3 b = parse_vec3("--beta", text);
  require(b.squaredNorm() < 1.0, "--beta must have magnitude < 1");
  return Boost(b);
}

}  // namespace detail

/// Parses argv-style arguments (without the program name), runs the selected
/// subcommand and writes its table. Returns 0 on success, 1 on a computation
/// error and 2 on a usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-deformed field theory toolkit", "qfield"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig c;
  std::function<Table()> job;
  std::string command;

  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", c.out_path, "Write output to FILE instead of stdout");
  app.add_option("--golden", c.golden, "Write or check a golden file for this invocation")
      ->check(CLI::IsMember({"write", "check"}));
  app.add_flag("--strict-paper-mode", c.strict_paper_mode,
               "Use the literal |P_B - P_A|^2 exchange denominator in Moller amplitudes");

  auto leaf = [&](CLI::App* sub, std::string name, std::function<Table()> fn) {
    sub->callback([&job, &command, name = std::move(name), fn = std::move(fn)] {
      command = name;
      job = fn;
    });
  };

  // qnum / planck
  auto* qnum = app.add_subcommand("qnum", "Basic number <n>_q");
  qnum->add_option("--q", c.q)->required();
  qnum->add_option("--n", c.n)->required();
  leaf(qnum, "qnum", [&] {
    require(c.n >= 0, "--n must be >= 0");
    Table t({"q", "n", "basic_number"});
    t.add({c.q, static_cast<long long>(c.n), basic_number(QParam(c.q), c.n)});
    return t;
  });

  auto* planck = app.add_subcommand("planck", "Deformed Planck occupancy 1/(e^x - q)");
  planck->add_option("--x", c.x)->required();
  planck->add_option("--q", c.q)->required();
  leaf(planck, "planck", [&] {
    Table t({"x", "q", "occupancy"});
    t.add({c.x, c.q, q_occupancy(c.x, QParam(c.q))});
    return t;
  });

  // fock
  auto* fock = app.add_subcommand("fock", "Truncated q-Fock space");
  fock->require_subcommand(1);
  auto* fock_vev = fock->add_subcommand("vev", "Brute-force vacuum expectation value");
  fock_vev->add_option("--ops", c.ops, "Operator string, e.g. 'a0 a0 A0 A0'")->required();
  fock_vev->add_option("--q", c.q)->required();
  fock_vev->add_option("--n-max", c.n_max);
  fock_vev->add_option("--modes", c.modes);
  fock_vev->add_option("--max-len", c.max_len);
  leaf(fock_vev, "fock_vev", [&] {
    const auto cfg = detail::fock_config(c);
    const auto ops = parse_ops(c.ops, cfg);
    Table t({"ops", "q", "n_max", "vev_re", "vev_im"});
    std::vector<Cell> row{to_string(ops), c.q, static_cast<long long>(cfg.n_max)};
    detail::add_complex(row, vev(ops, QParam(c.q), cfg));
    t.add(std::move(row));
    return t;
  });

  // wick
  auto* wick = app.add_subcommand("wick", "q-Wick expansion");
  wick->require_subcommand(1);
  auto* wick_normal = wick->add_subcommand("normal", "Normal ordering by rewriting");
  auto* wick_expand_cmd = wick->add_subcommand("expand", "Enumerate pairing diagrams");
  for (auto* sub : {wick_normal, wick_expand_cmd}) {
    sub->add_option("--ops", c.ops)->required();
    sub->add_option("--q", c.q)->required();
    sub->add_option("--modes", c.modes);
    sub->add_option("--max-len", c.max_len);
  }
  leaf(wick_normal, "wick_normal", [&] {
    const auto cfg = detail::fock_config(c);
    const auto nf = normal_order(parse_ops(c.ops, cfg), QParam(c.q), cfg);
    Table t({"term", "coefficient_re", "coefficient_im", "q_power"});
    for (const auto& term : nf.terms()) {
      std::vector<Cell> row{detail::string_or_identity(term.ops)};
      detail::add_complex(row, term.coefficient);
      row.emplace_back(term.q_power ? Cell{static_cast<long long>(*term.q_power)} : Cell{std::string{}});
      t.add(std::move(row));
    }
    return t;
  });
  leaf(wick_expand_cmd, "wick_expand", [&] {
    const auto cfg = detail::fock_config(c);
    const auto terms = wick_expand(parse_ops(c.ops, cfg), QParam(c.q), cfg);
    Table t({"pairs", "unpaired", "crossings", "open_crossings", "pair_value", "coefficient_re", "coefficient_im",
             "remainder"});
    for (const auto& term : terms) {
      std::vector<Cell> row{detail::diagram_pairs(term.diagram), detail::diagram_unpaired(term.diagram),
                            static_cast<long long>(term.diagram.crossings),
                            static_cast<long long>(term.diagram.open_crossings), term.pair_value};
      detail::add_complex(row, term.coefficient);
      row.emplace_back(detail::string_or_identity(term.remainder));
      t.add(std::move(row));
    }
    return t;
  });
  auto* wick_verify = wick->add_subcommand("verify", "Exhaustive oracle sweep against the Fock space");
  wick_verify->add_option("--max-len", c.max_len)->required();
  wick_verify->add_option("--q", c.q)->required();
  wick_verify->add_option("--modes", c.sweep_modes, "Number of particle modes used in the sweep");
  wick_verify->add_flag("--all", c.all, "Emit one row per string");
  bool verify_failed = false;
  leaf(wick_verify, "wick_verify", [&] {
    require(c.max_len >= 0 && c.max_len <= 10, "--max-len must be in [0, 10] for a sweep");
    require(c.sweep_modes >= 1 && c.sweep_modes <= 3, "--modes must be in [1, 3] for a sweep");
    FockConfig cfg;
    cfg.modes = std::max(cfg.modes, c.sweep_modes);
    cfg.max_string_length = std::max(cfg.max_string_length, c.max_len);
    if (c.all) {
      Table t({"ops", "q", "wick_vev_re", "wick_vev_im", "fock_vev_re", "fock_vev_im", "abs_diff", "pass"});
      std::vector<ModeLabel> labels;
      for (int m = 0; m < c.sweep_modes; ++m) labels.push_back({Species::particle, m});
      for (int len = 0; len <= c.max_len; ++len)
        for (const auto& s : enumerate_strings(len, labels)) {
          const auto rep = verify_wick(s, QParam(c.q), cfg);
          std::vector<Cell> row{detail::string_or_identity(s), c.q};
          detail::add_complex(row, rep.wick_vev);
          detail::add_complex(row, rep.fock_vev);
          row.emplace_back(rep.abs_diff);
          row.emplace_back(static_cast<long long>(rep.pass));
          if (!rep.pass) verify_failed = true;
          t.add(std::move(row));
        }
      return t;
    }
    const auto sum = verify_wick_sweep(c.max_len, c.sweep_modes, QParam(c.q), cfg);
    verify_failed = sum.failures > 0;
    Table t({"q", "modes", "max_len", "strings", "failures", "max_abs_diff"});
    t.add({c.q, static_cast<long long>(c.sweep_modes), static_cast<long long>(c.max_len),
           static_cast<long long>(sum.strings), static_cast<long long>(sum.failures), sum.max_abs_diff});
    return t;
  });

  // dirac
  auto* dirac = app.add_subcommand("dirac", "Dirac algebra checks");
  dirac->require_subcommand(1);
  auto* dirac_check = dirac->add_subcommand("check", "Residuals of the spinor and polarization identities");
  dirac_check->add_option("--m", c.m);
  dirac_check->add_option("--p", c.p3, "Spatial momentum px,py,pz");
  leaf(dirac_check, "dirac_check", [&] {
    const double m = detail::mass_flag(c);
    require(m > 0.0, "--m must be > 0");
    const FourVector p = FourVector::on_shell(parse_vec3("--p", c.p3), m);
    Table t({"check", "residual"});
    double anti = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const DiracMatrix ac = gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu);
        anti = std::max(anti, (ac - 2.0 * metric(mu, nu) * DiracMatrix::Identity()).cwiseAbs().maxCoeff());
      }
    t.add({std::string("gamma_anticommutator"), anti});
    t.add({std::string("u_completeness"),
           (spin_sum(p, m, SpinorKind::u) - theta_projector(p, +1, m)).cwiseAbs().maxCoeff()});
    t.add({std::string("v_completeness"),
           (spin_sum(p, m, SpinorKind::v) - theta_projector(p, -1, m)).cwiseAbs().maxCoeff()});
    double dirac_u = 0.0, dirac_v = 0.0, roundtrip = 0.0;
    for (int r = 1; r <= 2; ++r) {
      const auto u = u_spinor(p, r, m);
      const auto v = v_spinor(p, r, m);
      dirac_u = std::max(dirac_u, ((slash(p) - m * DiracMatrix::Identity()) * u.components).cwiseAbs().maxCoeff());
      dirac_v = std::max(dirac_v, ((slash(p) + m * DiracMatrix::Identity()) * v.components).cwiseAbs().maxCoeff());
      roundtrip = std::max(roundtrip, (charge_conjugate(v).components - u.components).cwiseAbs().maxCoeff());
    }
    t.add({std::string("dirac_equation_u"), dirac_u});
    t.add({std::string("dirac_equation_v"), dirac_v});
    t.add({std::string("charge_conjugation_roundtrip"), roundtrip});
    t.add({std::string("polarization_sum"),
           (polarization_sum(p, m) - polarization_sum_closed_form(p, m)).cwiseAbs().maxCoeff()});
    return t;
  });

  // propagator
  auto* prop = app.add_subcommand("propagator", "q-causal propagators");
  prop->require_subcommand(1);
  auto* prop_scalar = prop->add_subcommand("scalar", "Scalar propagator in momentum space");
  auto* prop_spinor = prop->add_subcommand("spinor", "Spinor propagator in momentum space");
  auto* prop_photon = prop->add_subcommand("photon", "Vector propagator in momentum space");
  for (auto* sub : {prop_scalar, prop_spinor, prop_photon}) {
    sub->add_option("--q", c.q)->required();
    sub->add_option("--m", c.m)->required();
    sub->add_option("--k0", c.k0, "Energy component, value or start:stop:count")->required();
    sub->add_option("--kvec", c.kvec, "Spatial momentum kx,ky,kz")->required();
  }
  prop_photon->add_option("--form", c.form)->check(CLI::IsMember({"metric", "massive"}));

  auto momentum_grid = [&] {
    const Vec3 kv = parse_vec3("--kvec", c.kvec);
    std::vector<FourVector> ks;
    for (double k0 : parse_grid("--k0", c.k0)) ks.emplace_back(k0, kv);
    return ks;
  };
  auto momentum_cells = [&](const FourVector& k) {
    return std::vector<Cell>{k[0], k[1], k[2], k[3], c.q, c.m};
  };
  leaf(prop_scalar, "propagator_scalar", [&] {
    const MassParam m(detail::mass_flag(c));
    const auto ks = momentum_grid();
    Table t({"k0", "k1", "k2", "k3", "q", "m", "re", "im", "onshell_distance"});
    for (const auto& k : ks) {
      const auto v = scalar_propagator_momentum(k, m, QParam(c.q));
      auto row = momentum_cells(k);
      detail::add_complex(row, v.value);
      row.emplace_back(v.onshell_distance);
      t.add(std::move(row));
    }
    return t;
  });
  auto matrix_table = [&](auto&& eval) {
    const auto ks = momentum_grid();
    Table t({"k0", "k1", "k2", "k3", "q", "m", "row", "col", "re", "im"});
    for (const auto& k : ks) {
      const auto v = eval(k);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          auto row = momentum_cells(k);
          row.emplace_back(static_cast<long long>(i));
          row.emplace_back(static_cast<long long>(j));
          detail::add_complex(row, v.value(i, j));
          t.add(std::move(row));
        }
    }
    return t;
  };
  leaf(prop_spinor, "propagator_spinor", [&] {
    const double mass = detail::mass_flag(c);
    require(mass > 0.0, "--m must be > 0 for the spinor propagator");
    return matrix_table([&](const FourVector& k) { return spinor_propagator_momentum(k, MassParam(mass), QParam(c.q)); });
  });
  leaf(prop_photon, "propagator_photon", [&] {
    const double mass = detail::mass_flag(c);
    const auto form = c.form == "massive" ? VectorForm::massive_projector : VectorForm::metric;
    require(form == VectorForm::metric || mass > 0.0, "--form massive requires --m > 0");
    return matrix_table(
        [&](const FourVector& k) { return photon_propagator_momentum(k, MassParam(mass), QParam(c.q), form); });
  });

  auto* prop_res = prop->add_subcommand("residues", "Numerically extracted pole strengths");
  prop_res->add_option("--kvec", c.kvec)->required();
  prop_res->add_option("--m", c.m)->required();
  prop_res->add_option("--q", c.q)->required();
  leaf(prop_res, "propagator_residues", [&] {
    const MassParam m(detail::mass_flag(c));
    const auto r = pole_residues(parse_vec3("--kvec", c.kvec), m, QParam(c.q));
    Table t({"q", "m", "residue_plus", "residue_minus", "analytic_plus", "analytic_minus", "error_estimate"});
    t.add({c.q, c.m, r.residue_plus, r.residue_minus, r.analytic_plus, r.analytic_minus, r.error_estimate});
    return t;
  });

  auto* prop_pos = prop->add_subcommand("position", "q-causal function in position space (i Delta_Fq)");
  prop_pos->add_option("--t", c.t, "Time, value or start:stop:count")->required();
  prop_pos->add_option("--r", c.r, "Distance, value or start:stop:count")->required();
  prop_pos->add_option("--m", c.m)->required();
  prop_pos->add_option("--q", c.q)->required();
  prop_pos->add_option("--rel-tol", c.rel_tol);
  leaf(prop_pos, "propagator_position", [&] {
    const MassParam m(detail::mass_flag(c));
    const auto ts = parse_grid("--t", c.t);
    const auto rs = parse_grid("--r", c.r);
    for (double t : ts) require(t != 0.0, "--t must be nonzero");
    for (double r : rs) require(r > 0.0, "--r must be > 0");
    require(c.rel_tol > 0.0 && c.rel_tol < 1.0, "--rel-tol must be in (0, 1)");
    PositionOptions opt{c.rel_tol};
    Table t({"t", "r", "m", "q", "re", "im", "quad_error"});
    for (double tv : ts)
      for (double rv : rs) {
        const auto v = causal_position(tv, rv, m, QParam(c.q), opt);
        std::vector<Cell> row{tv, rv, c.m, c.q};
        detail::add_complex(row, v.value);
        row.emplace_back(v.quad_error.value_or(0.0));
        t.add(std::move(row));
      }
    return t;
  });

  auto* prop_space = prop->add_subcommand("spacelike", "Equal-time q-commutator (1 - q) Delta_+(0, r)");
  prop_space->add_option("--r", c.r, "Distance, value or start:stop:count")->required();
  prop_space->add_option("--m", c.m)->required();
  prop_space->add_option("--q", c.q)->required();
  prop_space->add_option("--rel-tol", c.rel_tol);
  leaf(prop_space, "propagator_spacelike", [&] {
    const MassParam m(detail::mass_flag(c));
    const auto rs = parse_grid("--r", c.r);
    for (double r : rs) require(r > 0.0, "--r must be > 0");
    require(c.rel_tol > 0.0 && c.rel_tol < 1.0, "--rel-tol must be in (0, 1)");
    PositionOptions opt{c.rel_tol};
    Table t({"r", "m", "q", "delta_plus", "q_commutator", "quad_error"});
    for (double rv : rs) {
      const auto d = delta_plus_equal_time(rv, m, opt);
      const auto v = spacelike_q_commutator(rv, m, QParam(c.q), opt);
      t.add({rv, c.m, c.q, d.value, v.value, v.quad_error.value_or(0.0)});
    }
    return t;
  });

  // scatter
  auto* scatter = app.add_subcommand("scatter", "Tree-level scattering with q-corrected internal lines");
  scatter->require_subcommand(1);
  auto* moller = scatter->add_subcommand("moller", "e e -> e e amplitude");
  auto* annihilate = scatter->add_subcommand("annihilate", "e+ e- -> gamma gamma correction factors");
  auto* scan = scatter->add_subcommand("frame-scan", "Correction factors across boosted frames");
  for (auto* sub : {moller, annihilate, scan}) {
    sub->add_option("--q", c.q)->required();
    sub->add_option("--m", c.m);
    sub->add_option("--p", c.p, "Centre-of-mass beam momentum");
    sub->add_option("--theta", c.theta, "Centre-of-mass scattering angle (radians)");
    sub->add_option("--beta", c.beta, "Boost bx,by,bz applied to the centre-of-mass kinematics");
  }
  moller->add_option("--phi", c.phi);
  moller->add_option("--spins", c.spins, "rA,rB,rC,rD in {1,2}");
  scan->add_option("--process", c.process)->check(CLI::IsMember({"moller", "annihilate"}));
  scan->add_option("--axis", c.axis)->check(CLI::IsMember({"x", "y", "z"}));
  scan->add_option("--betas", c.betas, "Boost speeds along --axis, value or start:stop:count");

  auto validate_scatter = [&] {
    const double m = detail::mass_flag(c);
    require(m > 0.0, "--m must be > 0");
    require(c.p > 0.0 && std::isfinite(c.p), "--p must be > 0");
    require(std::isfinite(c.theta), "--theta must be finite");
    return detail::boost_flag(c.beta);
  };
  leaf(moller, "scatter_moller", [&] {
    const Boost b = validate_scatter();
    const auto sp = parse_list("--spins", c.spins, 4);
    std::array<int, 4> spins{};
    for (int i = 0; i < 4; ++i) {
      require(sp[static_cast<std::size_t>(i)] == 1.0 || sp[static_cast<std::size_t>(i)] == 2.0, "--spins entries must be 1 or 2");
      spins[static_cast<std::size_t>(i)] = static_cast<int>(sp[static_cast<std::size_t>(i)]);
    }
    const auto kin = boosted(moller_cm_kinematics(c.m, c.p, c.theta, c.phi), b);
    const auto a = moller_amplitude(kin, spins, QParam(c.q), {c.strict_paper_mode});
    Table t({"q", "amplitude_re", "amplitude_im", "direct_re", "direct_im", "exchange_re", "exchange_im", "f_ca",
             "f_da", "t_ca", "t_da"});
    std::vector<Cell> row{c.q};
    detail::add_complex(row, a.value);
    detail::add_complex(row, a.direct);
    detail::add_complex(row, a.exchange);
    row.insert(row.end(), {a.f_ca, a.f_da, a.t_ca, a.t_da});
    t.add(std::move(row));
    return t;
  });
  leaf(annihilate, "scatter_annihilate", [&] {
    const Boost b = validate_scatter();
    const auto kin = boosted(annihilation_cm_kinematics(c.m, c.p, c.theta), b);
    const auto f = annihilation_correction_pair(kin, QParam(c.q));
    Table t({"q", "f1", "f2"});
    t.add({c.q, f.first, f.second});
    return t;
  });
  leaf(scan, "scatter_frame-scan", [&] {
    const Boost b = validate_scatter();
    const int axis = detail::axis_index(c.axis);
    std::vector<Boost> boosts;
    for (double v : parse_grid("--betas", c.betas)) {
      require(std::abs(v) < 1.0, "--betas entries must have |beta| < 1");
      boosts.push_back(Boost::along(axis, v));
    }
    const bool is_moller = c.process == "moller";
    const auto kin = boosted(is_moller ? moller_cm_kinematics(c.m, c.p, c.theta) : annihilation_cm_kinematics(c.m, c.p, c.theta), b);
    const auto rows = frame_scan(kin, QParam(c.q), boosts, is_moller ? Process::moller : Process::annihilation);
    Table t({"beta_x", "beta_y", "beta_z", is_moller ? "f_ca" : "f1", is_moller ? "f_da" : "f2"});
    for (const auto& r : rows) t.add({r.beta.x(), r.beta.y(), r.beta.z(), r.first, r.second});
    return t;
  });

  // parse
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "usage error: " << msg << "\n";
    return 2;
  }

  std::string text;
  try {
    const Table table = job();
    text = c.format == "json" ? table.to_json() : table.to_csv();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  }

  if (!c.golden.empty()) {
    // --golden and --out do not affect the content
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const auto& a = args[i];
      if (a == "--golden" || a == "--out") {
        ++i;
        continue;
      }
      if (a.rfind("--golden=", 0) == 0 || a.rfind("--out=", 0) == 0) continue;
      kept.push_back(a);
    }
    std::string key;
    for (const auto& a : kept) {
      key += a;
      key += '\x1f';
    }
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
    const auto dir = std::filesystem::path(golden_root()) / command;
    const auto file = dir / (std::string(hash) + "." + c.format);
    if (c.golden == "write") {
      std::filesystem::create_directories(dir);
      std::ofstream(file, std::ios::binary) << text;
    } else {
      std::ifstream in(file, std::ios::binary);
      if (!in) {
        err << "error: GoldenMissing: " << file.string() << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      if (ss.str() != text) {
        err << "error: GoldenMismatch: " << file.string() << "\n";
        return 1;
      }
    }
  }

  if (!c.out_path.empty()) {
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) {
      err << "usage error: cannot open --out " << c.out_path << "\n";
      return 2;
    }
    f << text;
  } else {
    out << text;
  }
  if (verify_failed) {
    err << "error: WickMismatch: oracle sweep found failing strings\n";
    return 1;
  }
  return 0;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace qfield::cli
