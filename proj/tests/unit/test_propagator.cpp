#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracle_values.hpp"
#include "qfield/errors.hpp"
#include "qfield/propagator.hpp"
#include "qfield/quadrature.hpp"

using namespace qfield;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::vector<double> kQs = {-1.0, -0.5, 0.0, 0.3, 1.0, 1.2};

double omega(const Vec3& k, double m) { return std::sqrt(k.squaredNorm() + m * m); }

/// Off-shell momenta with |k^2 - m^2| > 0.1.
std::vector<FourVector> off_shell_grid(double m, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<FourVector> out;
  while (static_cast<int>(out.size()) < count) {
    const FourVector k(u(rng), u(rng), u(rng), u(rng));
    if (std::abs(k.square() - m * m) > 0.1) out.push_back(k);
  }
  return out;
}

}  // namespace

TEST_CASE("scalar propagator reference values", "[propagator]") {
  const FourVector k(0.0, 1.0, 0.0, 0.0);
  for (double q : kQs) {
    const auto v = scalar_propagator_momentum(k, MassParam(1.0), QParam(q));
    CHECK_THAT(v.value.real(), WithinAbs(-(1.0 + q) / 4.0, 1e-15));
    CHECK(v.value.imag() == 0.0);
    CHECK(v.onshell_distance == 2.0);
    CHECK_FALSE(v.quad_error.has_value());
  }
}

TEST_CASE("scalar propagator reductions", "[propagator]") {
  for (double m : {0.5, 1.0, 2.0}) {
    for (const auto& k : off_shell_grid(m, 200, 1)) {
      const double d = k.square() - m * m;
      const double w = omega(k.spatial(), m);
      CHECK(std::abs(scalar_propagator_momentum(k, MassParam(m), QParam(1.0)).value - 1.0 / d) <= 1e-12);
      CHECK(std::abs(scalar_propagator_momentum(k, MassParam(m), QParam(-1.0)).value - (k[0] / w) / d) <= 1e-12);
    }
  }
}

TEST_CASE("combined and partial-fraction forms agree", "[propagator]") {
  for (double q : kQs) {
    for (const auto& k : off_shell_grid(1.0, 200, 2)) {
      const auto a = scalar_propagator_momentum(k, MassParam(1.0), QParam(q)).value;
      const auto b = scalar_propagator_partial_fraction(k, MassParam(1.0), QParam(q)).value;
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("pole guard", "[propagator]") {
  const Vec3 kv(0.3, 0.4, 0.0);
  const double w = omega(kv, 1.0);
  CHECK_THROWS_AS(scalar_propagator_momentum(FourVector(w, kv), MassParam(1.0), QParam(0.5)), PoleError);
  CHECK_THROWS_AS(scalar_propagator_partial_fraction(FourVector(-w, kv), MassParam(1.0), QParam(0.5)), PoleError);
  CHECK_NOTHROW(scalar_propagator_momentum(FourVector(w + 1e-6, kv), MassParam(1.0), QParam(0.5)));
  CHECK_THROWS_AS(MassParam(-1.0), DomainError);
}

TEST_CASE("pole residues", "[propagator]") {
  SECTION("rest momentum") {
    for (double q : kQs) {
      const auto r = pole_residues(Vec3::Zero(), MassParam(1.0), QParam(q));
      CHECK_THAT(r.residue_plus, WithinAbs(0.5, 1e-8));
      CHECK_THAT(r.residue_minus, WithinAbs(-0.5 * q, 1e-8));
      CHECK(r.analytic_plus == 0.5);
      CHECK(r.analytic_minus == -0.5 * q);
    }
  }
  SECTION("left pole vanishes at q = 0") {
    const auto r = pole_residues(Vec3(0.5, -1.0, 2.0), MassParam(0.7), QParam(0.0));
    CHECK(std::abs(r.residue_minus) <= 1e-8);
  }
  SECTION("physical pole strength does not depend on q") {
    const Vec3 kv(1.0, 0.2, -0.4);
    const double first = pole_residues(kv, MassParam(1.3), QParam(-0.9)).residue_plus;
    for (double q : kQs) CHECK_THAT(pole_residues(kv, MassParam(1.3), QParam(q)).residue_plus, WithinAbs(first, 1e-9));
  }
  SECTION("massless with nonzero momentum") {
    const auto r = pole_residues(Vec3(0.0, 0.0, 2.0), MassParam(0.0), QParam(0.4));
    CHECK_THAT(r.residue_plus, WithinAbs(0.25, 1e-8));
    CHECK_THAT(r.residue_minus, WithinAbs(-0.1, 1e-8));
  }
  CHECK_THROWS_AS(pole_residues(Vec3::Zero(), MassParam(0.0), QParam(0.4)), DomainError);
}

TEST_CASE("spinor propagator", "[propagator]") {
  const double m = 1.1;
  for (const auto& p : off_shell_grid(m, 200, 3)) {
    const double d = p.square() - m * m;
    const DiracMatrix expected = (m * DiracMatrix::Identity() + slash(p)) / (2.0 * m * d);
    CHECK((spinor_propagator_momentum(p, MassParam(m), QParam(-1.0)).value - expected).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
  }
  const FourVector p0(0.0, 0.5, 1.0, -0.5);
  const double d = p0.square() - m * m;
  for (double q : kQs) {
    const auto v = spinor_propagator_momentum(p0, MassParam(m), QParam(q)).value;
    const double factor = (1.0 - q) / (2.0 * d);
    const DiracMatrix expected = factor * (m * DiracMatrix::Identity() + slash(p0)) / (2.0 * m);
    CHECK((v - expected).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(std::abs(v.trace() - 2.0 * factor) <= 1e-14);
  }
  CHECK_THROWS_AS(spinor_propagator_momentum(p0, MassParam(0.0), QParam(0.5)), ZeroMassError);
}

TEST_CASE("vector propagator", "[propagator]") {
  const double m = 0.8;
  for (const auto& k : off_shell_grid(m, 100, 4)) {
    const double d = k.square() - m * m;
    const auto g = photon_propagator_momentum(k, MassParam(m), QParam(1.0)).value;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) CHECK(std::abs(g(mu, nu) - metric(mu, nu) / d) <= 1e-12 * std::max(1.0, 1.0 / std::abs(d)));
  }
  // q = -1 stays finite through the half-sum form
  const FourVector k(0.5, 0.1, 0.2, 0.3);
  const double d = k.square() - m * m;
  const double w = omega(k.spatial(), m);
  const auto vm = photon_propagator_momentum(k, MassParam(m), QParam(-1.0)).value;
  CHECK(std::abs(vm(0, 0) - (k[0] / w) / d) <= 1e-14);

  // double contraction of the massive projector: k^2 (1 - k^2/m^2) times the scalar
  for (double q : {0.3, 1.0}) {
    const auto t = photon_propagator_momentum(k, MassParam(m), QParam(q), VectorForm::massive_projector).value;
    const auto s = scalar_propagator_momentum(k, MassParam(m), QParam(q)).value;
    std::complex<double> kk{};
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) kk += k[mu] * t(mu, nu) * k[nu];
    const double k2 = k.square();
    CHECK(std::abs(kk - k2 * (1.0 - k2 / (m * m)) * s) <= 1e-12);
  }
  CHECK_THROWS_AS(photon_propagator_momentum(k, MassParam(0.0), QParam(0.5), VectorForm::massive_projector),
                  ZeroMassError);
}

TEST_CASE("massive projector is transverse on shell", "[propagator]") {
  const double m = 1.4;
  const FourVector k = FourVector::on_shell(Vec3(0.3, -0.7, 1.1), m);
  for (int nu = 0; nu < 4; ++nu) {
    double c = 0.0;
    for (int mu = 0; mu < 4; ++mu) c += k[mu] * (metric(mu, nu) - k.lower(mu) * k.lower(nu) / (m * m));
    CHECK(std::abs(c) <= 1e-14);
  }
}

TEST_CASE("massless transverse vector propagator", "[propagator]") {
  const FourVector k(0.5, 0.0, 0.0, 2.0);
  const auto v = photon_transverse_propagator(k, QParam(0.5));
  const auto s = scalar_propagator_momentum(k, MassParam(0.0), QParam(0.5)).value;
  CHECK(std::abs(v.value(0, 0) - s) <= 1e-15);
  CHECK(std::abs(v.value(2, 2)) == 0.0);
}

TEST_CASE("equal-time Wightman function against the Bessel form", "[propagator]") {
  for (const auto& o : oracle::kEqualTime) {
    const auto v = delta_plus_equal_time(o.mr, MassParam(1.0));
    REQUIRE(v.quad_error.has_value());
    CHECK_THAT(v.value, WithinRel(o.value, 1e-7));
    CHECK_THAT(v.value, WithinRel(oracle::bessel_spacelike(o.mr, 1.0), 1e-7));
  }
}

TEST_CASE("equal-time Wightman function scaling and massless limit", "[propagator]") {
  const double r = 0.7;
  const double m = 2.3;
  CHECK_THAT(delta_plus_equal_time(r, MassParam(m)).value,
             WithinRel(m * m * delta_plus_equal_time(m * r, MassParam(1.0)).value, 1e-8));
  const auto massless = delta_plus_equal_time(r, MassParam(0.0));
  CHECK_THAT(massless.value, WithinRel(1.0 / (oracle::kFourPiSquared * r * r), 1e-15));
  CHECK_FALSE(massless.quad_error.has_value());
  CHECK_THAT(delta_plus_equal_time(r, MassParam(1e-4)).value, WithinRel(massless.value, 1e-6));
  CHECK_THROWS_AS(delta_plus_equal_time(0.0, MassParam(1.0)), DomainError);
}

TEST_CASE("spacelike and timelike Wightman function", "[propagator]") {
  for (const auto& o : oracle::kSpacelike) {
    const auto v = wightman_plus(o.t, o.r, MassParam(1.0));
    CHECK_THAT(v.value.real(), WithinRel(o.value, 1e-7));
    CHECK(std::abs(v.value.imag()) <= 1e-9 * o.value);
    CHECK_THAT(v.value.real(), WithinRel(oracle::bessel_spacelike(std::sqrt(o.r * o.r - o.t * o.t), 1.0), 1e-7));
  }
  for (const auto& o : oracle::kTimelike) {
    const auto v = wightman_plus(o.t, o.r, MassParam(1.0));
    const std::complex<double> ref(o.re, o.im);
    CHECK(std::abs(v.value - ref) <= 1e-7 * std::abs(ref));
    CHECK(std::abs(v.value - oracle::bessel_timelike(std::sqrt(o.t * o.t - o.r * o.r), 1.0)) <= 1e-7 * std::abs(ref));
  }
  CHECK_THROWS_AS(wightman_plus(1.0, 1.0, MassParam(1.0)), DomainError);
}

TEST_CASE("causal function in position space", "[propagator]") {
  const double r = 1.0;
  const double t = 0.6;
  const auto forward = causal_position(t, r, MassParam(1.0), QParam(1.0)).value;
  const auto backward = causal_position(-t, r, MassParam(1.0), QParam(1.0)).value;
  CHECK(std::abs(forward - backward) <= 1e-14);
  for (double q : kQs) {
    CHECK(std::abs(causal_position(-t, r, MassParam(1.0), QParam(q)).value - q * forward) <= 1e-14);
  }
  CHECK_THROWS_AS(causal_position(0.0, r, MassParam(1.0), QParam(0.5)), EqualTimeError);

  // continuity at t -> 0+
  const double eq = delta_plus_equal_time(r, MassParam(1.0)).value;
  CHECK_THAT(causal_position(1e-6, r, MassParam(1.0), QParam(0.5)).value.real(), WithinRel(eq, 1e-4));
}

TEST_CASE("spacelike q-commutator", "[propagator]") {
  for (double mr : {0.3, 1.0, 3.0}) {
    const double d = delta_plus_equal_time(mr, MassParam(1.0)).value;
    CHECK(spacelike_q_commutator(mr, MassParam(1.0), QParam(1.0)).value == 0.0);
    CHECK(std::abs(spacelike_q_commutator(mr, MassParam(1.0), QParam(0.5)).value - 0.5 * d) <= 1e-12 * d);
  }
  // exponential decay: ratio over a unit step approaches e^{-1}
  const double a = spacelike_q_commutator(8.0, MassParam(1.0), QParam(0.5)).value;
  const double b = spacelike_q_commutator(9.0, MassParam(1.0), QParam(0.5)).value;
  CHECK(b / a < 0.5);
  CHECK(b / a > 0.25);
}

TEST_CASE("time transform of the mixed representation reproduces the poles", "[propagator]") {
  // Int dt e^{i k0 t} e^{-delta |t|} (mixed function) -> i times the momentum-space value
  const Vec3 kv(0.4, 0.0, 0.3);
  const double m = 1.0;
  const double delta = 1e-4;
  const double horizon = 25.0 / delta;
  for (double q : {0.0, 0.5, 1.0}) {
    for (double k0 : {-2.5, 0.3, 2.0}) {
      std::complex<double> total{};
      const double width = 1.0;
      for (double a = 0.0; a < horizon; a += width) {
        for (double sign : {1.0, -1.0}) {
          total += quad::gauss_kronrod15(
                       [&](double s) {
                         const double tt = sign * s;
                         return std::polar(std::exp(-delta * s), k0 * tt) * causal_mixed(tt, kv, MassParam(m), QParam(q));
                       },
                       a, a + width)
                       .value;
        }
      }
      const auto expected = std::complex<double>(0.0, 1.0) *
                            scalar_propagator_momentum(FourVector(k0, kv), MassParam(m), QParam(q)).value;
      CHECK(std::abs(total - expected) <= 1e-3 * std::abs(expected) + 1e-3);
    }
  }
}

TEST_CASE("q-combination coefficients", "[propagator]") {
  CHECK(delta_q_minus(QParam(-1.0)) == delta_q_plus(QParam(1.0)));
  CHECK(delta_q_minus(QParam(0.3)) == DeltaCombination{1.0, -0.3});
  CHECK(delta_q_plus(QParam(0.3)) == DeltaCombination{1.0, 0.3});
}
