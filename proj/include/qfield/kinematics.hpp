#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qfield/errors.hpp"

namespace qfield {

using Vec3 = Eigen::Vector3d;

/// Contravariant four-vector (p^0, p^1, p^2, p^3), metric (+,-,-,-), hbar = c = 1.
struct FourVector {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  FourVector() = default;
  FourVector(double p0, double p1, double p2, double p3) : c{p0, p1, p2, p3} {}
  FourVector(double p0, const Vec3& p) : c{p0, p.x(), p.y(), p.z()} {}

  /// On-shell vector with p^0 = sqrt(|p|^2 + m^2).
  static FourVector on_shell(const Vec3& p, double m) { return {std::sqrt(p.squaredNorm() + m * m), p}; }

  double operator[](int mu) const { return c[static_cast<std::size_t>(mu)]; }
  double& operator[](int mu) { return c[static_cast<std::size_t>(mu)]; }

  double energy() const { return c[0]; }
  Vec3 spatial() const { return {c[1], c[2], c[3]}; }

  /// Covariant component p_mu.
  double lower(int mu) const { return mu == 0 ? c[0] : -c[static_cast<std::size_t>(mu)]; }

  double dot(const FourVector& o) const { return c[0] * o.c[0] - c[1] * o.c[1] - c[2] * o.c[2] - c[3] * o.c[3]; }
  double square() const { return dot(*this); }

  friend FourVector operator+(const FourVector& a, const FourVector& b) {
    return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.c[3] + b.c[3]};
  }
  friend FourVector operator-(const FourVector& a, const FourVector& b) {
    return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.c[3] - b.c[3]};
  }
  friend FourVector operator*(double s, const FourVector& a) {
    return {s * a.c[0], s * a.c[1], s * a.c[2], s * a.c[3]};
  }
  friend bool operator==(const FourVector&, const FourVector&) = default;
};

/// Diagonal Minkowski metric g_{mu nu} = g^{mu nu}.
inline double metric(int mu, int nu) {
  if (mu != nu) return 0.0;
  return mu == 0 ? 1.0 : -1.0;
}

/// Active boost by velocity beta (|beta| < 1): a particle at rest acquires
/// velocity beta.
class Boost {
 public:
  Boost() : beta_(Vec3::Zero()) {}
  explicit Boost(const Vec3& beta) : beta_(beta) {
    if (!(beta.squaredNorm() < 1.0)) {
      throw SuperluminalError("boost velocity |beta| = " + std::to_string(beta.norm()) + " is not < 1");
    }
  }
  static Boost along(int axis, double beta) {
    Vec3 b = Vec3::Zero();
    b[axis] = beta;
    return Boost(b);
  }

  const Vec3& beta() const { return beta_; }
  double gamma() const { return 1.0 / std::sqrt(1.0 - beta_.squaredNorm()); }
  double rapidity() const { return std::atanh(beta_.norm()); }

 private:
  Vec3 beta_;
};

inline FourVector boost(const FourVector& p, const Boost& b) {
  const Vec3& beta = b.beta();
  const double b2 = beta.squaredNorm();
  if (b2 == 0.0) return p;
  const double g = b.gamma();
  const Vec3 pv = p.spatial();
  const double bp = beta.dot(pv);
  const double e = g * (p.energy() + bp);
  const Vec3 out = pv + ((g - 1.0) * bp / b2 + g * p.energy()) * beta;
  return {e, out};
}

}  // namespace qfield
