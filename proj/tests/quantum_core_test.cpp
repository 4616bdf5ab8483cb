#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "weakmeter/errors.hpp"
#include "weakmeter/quantum_core.hpp"

using namespace weakmeter;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix reconstruct(const Eigensystem& es) {
  const std::size_t d = es.vectors.dim();
  CMatrix out(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t k = 0; k < d; ++k)
        out(r, c) += es.vectors(r, k) * es.values[k] * std::conj(es.vectors(c, k));
  return out;
}

}  // namespace

TEST_CASE("system state requires unit norm and supported dimension") {
  CHECK_NOTHROW(SystemState({1.0, 0.0}));
  CHECK_THROWS_AS(SystemState({1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(SystemState({1.0}), ValidationError);
  CHECK_THROWS_AS(SystemState(CVector(9, 1.0 / 3.0)), ValidationError);
  const SystemState s = SystemState::normalized({3.0, cplx(0.0, 4.0)});
  CHECK(norm(s.span()) == Approx(1.0).epsilon(1e-15));
  CHECK(s[1].imag() == Approx(0.8));
}

TEST_CASE("eigh of sigma_z and n.sigma") {
  const Eigensystem z = eigh(pauli_z());
  CHECK(z.values[0] == Approx(-1.0));
  CHECK(z.values[1] == Approx(1.0));

  fixtures::Rng rng;
  for (int i = 0; i < 20; ++i) {
    const Direction n = Direction::from_angles(rng.uniform(0.0, kPi), rng.uniform(0.0, 2.0 * kPi));
    const ObservableOp op = spin_observable(n);
    CHECK(op.eigenvalues()[0] == Approx(-1.0).epsilon(1e-12));
    CHECK(op.eigenvalues()[1] == Approx(1.0).epsilon(1e-12));
    CHECK(op.max_abs_eigenvalue() == Approx(1.0));
  }
}

TEST_CASE("eigh reconstructs random hermitian matrices") {
  fixtures::Rng rng;
  for (std::size_t d : {2u, 3u, 4u, 8u}) {
    const CMatrix m = rng.hermitian(d);
    const Eigensystem es = eigh(m);
    CHECK(reconstruct(es).max_abs_diff(m) < 1e-10);
    const CMatrix gram = es.vectors.adjoint() * es.vectors;
    CHECK(gram.max_abs_diff(CMatrix::identity(d)) < 1e-10);
    for (std::size_t k = 1; k < d; ++k) CHECK(es.values[k - 1] <= es.values[k]);
  }
}

TEST_CASE("eigh rejects non-hermitian input") {
  CMatrix m(2, {0.0, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(eigh(m), ValidationError);
}

TEST_CASE("spin observable along theta = pi/3 has the half-angle eigenvector") {
  const double theta = kPi / 3.0;
  const ObservableOp op = spin_observable(Direction::from_angles(theta, 0.0));
  const CVector up = op.eigenvector(1);
  CHECK(up[0].real() == Approx(std::cos(theta / 2.0)).epsilon(1e-12));
  CHECK(up[1].real() == Approx(std::sin(theta / 2.0)).epsilon(1e-12));
  CHECK(std::abs(up[1].imag()) < 1e-12);
}

TEST_CASE("bloch_to_spinor") {
  const SystemState zp = bloch_to_spinor(Direction({0.0, 0.0, 1.0}));
  CHECK(std::abs(zp[0] - cplx(1.0)) < 1e-15);
  CHECK(std::abs(zp[1]) < 1e-15);
  const SystemState xp = bloch_to_spinor(Direction({1.0, 0.0, 0.0}));
  CHECK(xp[0].real() == Approx(std::sqrt(0.5)));
  CHECK(xp[1].real() == Approx(std::sqrt(0.5)));
  const SystemState zm = bloch_to_spinor(Direction({0.0, 0.0, -1.0}));
  CHECK(std::abs(zm[0]) < 1e-15);
  CHECK(std::abs(zm[1]) == Approx(1.0));

  fixtures::Rng rng;
  for (int i = 0; i < 100; ++i) {
    const Direction n = Direction::from_angles(rng.uniform(0.0, kPi), rng.uniform(0.0, 2.0 * kPi));
    CHECK(expectation(bloch_to_spinor(n), spin_observable(n)) == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("direction must be a unit vector") {
  CHECK_THROWS_AS(Direction({1.0, 1.0, 0.0}), ValidationError);
  const Vec3 c = cross({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
  CHECK(c[2] == 1.0);
  CHECK(dot({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}) == 6.0);
}

TEST_CASE("evolve_state") {
  fixtures::Rng rng;
  const SystemState s = rng.state(2);
  const ObservableOp sz(pauli_z());

  const SystemState same = evolve_state(s, sz, 0.0);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(same[i] - s[i]) < 1e-15);

  // exp(-i pi sigma_z) = -1
  const SystemState flipped = evolve_state(s, sz, kPi);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(flipped[i] + s[i]) < 1e-12);

  for (std::size_t d : {2u, 3u, 5u}) {
    const ObservableOp h(rng.hermitian(d));
    const SystemState s0 = rng.state(d);
    const SystemState s1 = evolve_state(s0, h, rng.uniform(-3.0, 3.0));
    CHECK(norm(s1.span()) == Approx(1.0).epsilon(1e-12));
    CHECK(expectation(s1, h) == Approx(expectation(s0, h)).epsilon(1e-12));
  }
}

TEST_CASE("evolution does not depend on the basis chosen inside a degenerate eigenspace") {
  // H = diag(1, 1, -1) written in a rotated basis; any eigenbasis must give
  // exp(-i H t) = e^{-it} P + e^{it} (1 - P).
  fixtures::Rng rng;
  const CMatrix u = eigh(rng.hermitian(3)).vectors;
  CMatrix diag(3);
  diag(0, 0) = 1.0;
  diag(1, 1) = 1.0;
  diag(2, 2) = -1.0;
  const ObservableOp h(u * diag * u.adjoint());
  const SystemState s0 = rng.state(3);
  const double t = 0.7;
  const SystemState s1 = evolve_state(s0, h, t);

  CMatrix proj(3);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t k = 0; k < 2; ++k) proj(r, c) += u(r, k) * std::conj(u(c, k));
  const CMatrix prop = std::polar(1.0, -t) * proj + std::polar(1.0, t) * (CMatrix::identity(3) + cplx(-1.0) * proj);
  const CVector expected = prop.apply(s0.span());
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s1[i] - expected[i]) < 1e-12);
}
