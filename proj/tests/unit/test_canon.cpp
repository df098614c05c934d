#include "doctest.h"

#include <cmath>

#include "canonforge/canon.hpp"

using cf::cplx;

namespace {
const cf::StructureFamily& fam() {
  static const cf::StructureFamily f(cf::zeta_datum(), 1.2, 1, 0.5);
  return f;
}
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
constexpr cplx I1(0.0, 1.0);
}  // namespace

TEST_CASE("family basics") {
  CHECK(fam().m(0.0) == 1.0);
  CHECK(fam().gamma(-1.0) == 1.0);
  CHECK(fam().m(0.2) > 0.0);
  CHECK(fam().gamma(0.2) == doctest::Approx(fam().m(0.2) * fam().m(0.2)));
  CHECK_THROWS_AS(cf::StructureFamily(cf::zeta_datum(), 1.2, 1, -1.0), cf::ValidationError);
  const cplx z(0.4, 2.2);
  CHECK(fam().E_sharp(z) == fam().E(-z));
}

TEST_CASE("reconstruction at t = 0 through the kernel") {
  for (cplx z : {cplx(0, 3), cplx(1.5, 2.5), cplx(-4, 3.5)}) {
    const auto p = cf::ab_direct(fam(), 0.0, z);
    CHECK(rel(p.A - I1 * p.B, fam().E(z)) <= 1e-6);
    // the components carry the kernel: A = (E + E#)/2 needs the Fourier identity
    CHECK(std::abs(p.A - fam().A(z)) <= 1e-6 * std::abs(fam().E(z)));
    CHECK(std::abs(p.B - fam().B(z)) <= 1e-6 * std::abs(fam().E(z)));
  }
  CHECK_THROWS_AS(cf::ab_direct(fam(), 0.0, cplx(0, 1)), cf::ValidationError);
}

TEST_CASE("finite-range and half-line routes agree for t > 0") {
  for (double t : {0.1, 0.25}) {
    const cplx z(0.5, 3.0);
    const auto a = cf::ab_eval(fam(), t, z), b = cf::ab_direct(fam(), t, z);
    CHECK(rel(a.A, b.A) <= 1e-6);
    CHECK(rel(a.B, b.B) <= 1e-6);
  }
}

TEST_CASE("A at z = 0 is constant in t") {
  const cplx a0 = cf::ab_eval(fam(), 0.0, 0.0).A;
  for (double t : {-0.7, 0.1, 0.3}) {
    const auto p = cf::ab_eval(fam(), t, 0.0);
    CHECK(std::abs(p.A - a0) <= 1e-7 * std::abs(a0));
    CHECK(std::abs(p.B) <= 1e-9);
  }
}

TEST_CASE("parity of A and B") {
  for (cplx z : {cplx(1.3, 0.4), cplx(0, 2), cplx(5, -1)}) {
    const auto p = cf::ab_eval(fam(), 0.5, z), q = cf::ab_eval(fam(), 0.5, -z);
    CHECK(std::abs(p.A - q.A) <= 1e-8 * std::abs(p.A));
    CHECK(std::abs(p.B + q.B) <= 1e-8 * std::abs(p.B));
  }
}

TEST_CASE("A and B are real on the real axis") {
  const auto p = cf::ab_eval(fam(), 0.2, 3.7);
  CHECK(std::abs(p.A.imag()) <= 1e-10 * std::abs(p.A));
  CHECK(std::abs(p.B.imag()) <= 1e-10 * std::abs(p.B));
}

TEST_CASE("canonical system residual") {
  CHECK(cf::ode_residual(fam(), 0.2, 0.0, 1e-3) == 0.0);
  const double r1 = cf::ode_residual(fam(), 0.2, cplx(0, 2), 1e-3);
  const double r2 = cf::ode_residual(fam(), 0.2, cplx(0, 2), 5e-4);
  CHECK(r1 <= 1e-3);
  // centered stencil, second order
  CHECK(std::log2(r1 / r2) >= 1.8);
  CHECK(cf::ode_residual(fam(), 0.5, cplx(0, 2), 1e-3) <= 1e-3);
}

TEST_CASE("propagation") {
  const cplx z(0, 3);
  const auto id = cf::propagate(fam(), z, 0.2, 0.2);
  const auto d = cf::ab_eval(fam(), 0.2, z);
  CHECK(std::abs(id.A - d.A) <= 1e-14 * std::abs(d.A));
  const auto back = cf::propagate(fam(), cplx(2, 0), 0.0, -1.0);
  const auto closed = cf::ab_eval(fam(), -1.0, cplx(2, 0));
  CHECK(std::abs(back.A - closed.A) <= 1e-12 * std::abs(closed.A));
  CHECK(std::abs(back.B - closed.B) <= 1e-12 * std::abs(closed.B));
  const auto p = cf::propagate(fam(), z, 0.0, 0.3);
  const auto q = cf::ab_eval(fam(), 0.3, z);
  CHECK(rel(p.A, q.A) <= 1e-4);
  CHECK(rel(p.B, q.B) <= 1e-4);
}

TEST_CASE("reproducing kernel J") {
  const cplx z(0.3, 1.0), w(-1.1, 0.6);
  for (double t : {0.0, 0.15, 0.3}) CHECK(cf::j_eval(fam(), t, z, z).real() >= 0.0);
  // Hermitian symmetry
  const cplx a = cf::j_eval(fam(), 0.2, z, w), b = cf::j_eval(fam(), 0.2, w, z);
  CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
  // J(t; 0, w) = A(0, 0) B(t, w) / (pi w)
  const cplx A00 = cf::ab_eval(fam(), 0.0, 0.0).A;
  const cplx j0 = cf::j_eval(fam(), 0.2, 0.0, w);
  CHECK(rel(j0, A00 * cf::ab_eval(fam(), 0.2, w).B / (cf::kPi * w)) <= 1e-7);
  // the diagonal formula is the limit of the off-diagonal one
  const cplx near = cf::j_eval(fam(), 0.2, z, z + cplx(1e-6, 0));
  CHECK(rel(near, cf::j_eval(fam(), 0.2, z, z)) <= 1e-5);
  // confluent point w = conj z
  const cplx zc = std::conj(z);
  const cplx conf = cf::j_eval(fam(), 0.2, z, zc), off = cf::j_eval(fam(), 0.2, z, zc + cplx(1e-5, 0));
  CHECK(rel(conf, off) <= 1e-4);
}

TEST_CASE("J decreases and its increment is the Hamiltonian integral") {
  const cplx z(0, 1);
  double prev = cf::j_eval(fam(), 0.0, z, z).real();
  for (double t = 0.05; t <= 0.3001; t += 0.05) {
    const double j = cf::j_eval(fam(), t, z, z).real();
    CHECK(j < prev);
    prev = j;
  }
  const cplx w(0.7, 0.5);
  const cplx dj = cf::j_eval(fam(), 0.1, z, w) - cf::j_eval(fam(), 0.3, z, w);
  CHECK(rel(cf::j_increment(fam(), 0.1, 0.3, z, w), dj) <= 1e-4);
}

TEST_CASE("fields F and G") {
  const auto& rho = fam().rho();
  for (double x : {0.0, 0.4, -1.3}) {
    const auto f = cf::fields_fg(fam(), 0.0, x);
    CHECK(std::abs(f.F - 0.5 * (rho(x) + rho(-x))) <= 1e-8);
    CHECK(std::abs(f.G - 0.5 * (rho(x) - rho(-x))) <= 1e-8);
  }
  for (double x : {0.3, 0.9, 2.1}) {
    const auto p = cf::fields_fg(fam(), 0.2, x), q = cf::fields_fg(fam(), 0.2, -x);
    CHECK(std::abs(p.F - q.F) <= 1e-10 * (1 + std::abs(p.F)));
    CHECK(std::abs(p.G + q.G) <= 1e-10 * (1 + std::abs(p.G)));
  }
}

TEST_CASE("pde residuals") {
  const auto r = cf::pde_residual(fam(), 0.2, 0.7, 1e-3, 1e-3);
  CHECK(r.r1 <= 1e-3);
  CHECK(r.r2 <= 1e-3);
  const auto tail = cf::pde_residual(fam(), 0.2, 6.0, 1e-3, 1e-3);
  CHECK(tail.abs1 <= 1e-6);
  CHECK(tail.abs2 <= 1e-6);
}
