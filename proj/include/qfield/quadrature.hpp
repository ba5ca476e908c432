#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "qfield/errors.hpp"

namespace qfield::quad {

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }

}  // namespace detail

/// One G7-K15 panel; the error is |K15 - G7|.
template <class F>
auto gauss_kronrod15(F&& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * detail::kWgk[7];
  T gauss = fc * detail::kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * detail::kXgk[static_cast<std::size_t>(j)];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * detail::kWgk[static_cast<std::size_t>(j)];
    if (j % 2 == 1) gauss += sum * detail::kWg[static_cast<std::size_t>(j / 2)];
  }
  Result<T> r;
  r.value = kronrod * half;
  r.error = detail::magnitude((kronrod - gauss) * half);
  r.evaluations = 15;
  return r;
}

/// Globally adaptive bisection on [a, b]: the interval with the largest error
/// estimate is split until the total error meets max(abs_tol, rel_tol |I|).
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, double rel_tol, int max_intervals = 400) {
  using R = decltype(gauss_kronrod15(f, a, b));
  struct Piece {
    double lo, hi;
    R r;
    bool operator<(const Piece& o) const { return r.error < o.r.error; }
  };
  std::priority_queue<Piece> pieces;
  R first = gauss_kronrod15(f, a, b);
  R total = first;
  pieces.push({a, b, first});
  int intervals = 1;
  while (total.error > std::max(abs_tol, rel_tol * detail::magnitude(total.value)) && intervals < max_intervals) {
    Piece worst = pieces.top();
    pieces.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    R left = gauss_kronrod15(f, worst.lo, mid);
    R right = gauss_kronrod15(f, mid, worst.hi);
    total.value += left.value + right.value - worst.r.value;
    total.error += left.error + right.error - worst.r.error;
    total.evaluations += left.evaluations + right.evaluations;
    pieces.push({worst.lo, mid, left});
    pieces.push({mid, worst.hi, right});
    ++intervals;
  }
  // re-sum to shed the drift of the running updates
  decltype(total.value) value{};
  double error = 0.0;
  while (!pieces.empty()) {
    value += pieces.top().r.value;
    error += pieces.top().r.error;
    pieces.pop();
  }
  total.value = value;
  total.error = error;
  return total;
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
template <class T>
class WynnEpsilon {
 public:
  explicit WynnEpsilon(std::size_t window = 40) : window_(window) {}

  void push(T partial_sum) {
    sums_.push_back(partial_sum);
    if (sums_.size() > window_) sums_.erase(sums_.begin());
    previous_ = current_;
    current_ = extrapolate();
    ++count_;
  }

  T estimate() const { return current_; }
  /// Distance between the two most recent extrapolations.
  double change() const { return count_ < 2 ? std::numeric_limits<double>::infinity() : detail::magnitude(current_ - previous_); }
  std::size_t count() const { return count_; }

 private:
  T extrapolate() const {
    const std::size_t n = sums_.size();
    std::vector<T> prev(n + 1, T{});  // column k-1
    std::vector<T> cur(sums_.begin(), sums_.end());  // column k
    T best = cur.back();
    for (std::size_t k = 1; k < n; ++k) {
      std::vector<T> next(n - k);
      for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
        const T diff = cur[j + 1] - cur[j];
        if (detail::magnitude(diff) == 0.0) return best;
        next[j] = prev[j + 1] + T(1.0) / diff;
      }
      prev.assign(cur.begin(), cur.end());
      cur = std::move(next);
      if (k % 2 == 0) {
        const T candidate = cur.back();
        if (!std::isfinite(detail::magnitude(candidate))) return best;
        best = candidate;
      }
    }
    return best;
  }

  std::size_t window_;
  std::vector<T> sums_;
  T current_{};
  T previous_{};
  std::size_t count_ = 0;
};

struct OscillatoryOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-15;
  int min_panels = 12;
  int max_panels = 4000;
};

/// Integral of exp(i a k) phi(k) over k in [0, inf) for a != 0 and phi
/// decaying at least like 1/k. Panels run between consecutive zeros of
/// sin(a k); the alternating sequence of partial sums is extrapolated.
template <class Phi>
Result<std::complex<double>> fourier_half_line(double a, Phi&& phi, const OscillatoryOptions& opt = {}) {
  using C = std::complex<double>;
  if (a == 0.0 || !std::isfinite(a)) throw DomainError("fourier_half_line: frequency must be finite and nonzero");
  const double width = std::numbers::pi / std::abs(a);
  auto integrand = [&](double k) -> C { return std::polar(1.0, a * k) * C(phi(k)); };

  WynnEpsilon<C> wynn;
  Result<C> out;
  C partial{};
  double panel_error = 0.0;
  int stable = 0;
  for (int n = 0; n < opt.max_panels; ++n) {
    const auto panel = integrate(integrand, n * width, (n + 1) * width, opt.abs_tol * 1e-2, opt.rel_tol * 1e-3);
    partial += panel.value;
    panel_error += panel.error;
    out.evaluations += panel.evaluations;
    wynn.push(partial);
    if (n + 1 < opt.min_panels) continue;
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(wynn.estimate()));
    if (wynn.change() <= tol) {
      if (++stable >= 2) {
        out.value = wynn.estimate();
        out.error = wynn.change() + panel_error;
        return out;
      }
    } else {
      stable = 0;
    }
  }
  throw ConvergenceError("fourier_half_line: extrapolated tail did not stabilize within " +
                         std::to_string(opt.max_panels) + " panels (a = " + std::to_string(a) + ")");
}

}  // namespace qfield::quad
