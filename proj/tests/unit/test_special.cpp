#include "doctest.h"

#include <cmath>

#include "canonforge/special.hpp"

using cf::cplx;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("gamma at classical points") {
  CHECK(std::abs(cf::complex_gamma(1.0).value() - 1.0) < 1e-14);
  CHECK(std::abs(cf::complex_gamma(0.5).value() - std::sqrt(cf::kPi)) < 1e-14);
  CHECK(std::abs(cf::complex_gamma(6.0).value() - 120.0) < 1e-11);
}

TEST_CASE("gamma against high precision reference values") {
  // mpmath, 30 digits
  CHECK(rel(cf::complex_gamma(cplx(3, 4)).value(), cplx(0.0052255384713692141947, -0.17254707929430018772)) < 1e-12);
  CHECK(rel(cf::complex_gamma(cplx(-2.5, 0.5)).value(), cplx(-0.33387520352243233740, -0.20645730796360841492)) <
        1e-12);
  const cplx lg = cf::log_gamma(cplx(20, 30));
  CHECK(std::abs(lg.real() - 21.345074493863444896) < 1e-12);
  CHECK(std::abs(std::remainder(lg.imag() - 96.714347689536180139, 2 * cf::kPi)) < 1e-11);
}

TEST_CASE("gamma recurrence and reflection") {
  for (cplx z : {cplx(0.3, 1.7), cplx(-3.2, 0.4), cplx(7.5, -12.0), cplx(0.01, 0.02)}) {
    const cplx g = cf::complex_gamma(z).value(), g1 = cf::complex_gamma(z + 1.0).value();
    CHECK(rel(g1, z * g) < 1e-12);
    const cplx refl = g * cf::complex_gamma(1.0 - z).value() * std::sin(cf::kPi * z);
    CHECK(std::abs(refl - cf::kPi) < 1e-11);
  }
}

TEST_CASE("scaled gamma stays finite where gamma overflows") {
  const auto g = cf::complex_gamma(cplx(200.0, 1.0));
  CHECK(std::isfinite(g.log_scale));
  CHECK(std::abs(std::abs(g.mantissa) - 1.0) < 1e-14);
  CHECK(std::abs(g.log_scale - std::real(cf::log_gamma(cplx(200.0, 1.0)))) < 1e-9);
}

TEST_CASE("log sin pi matches the direct formula and survives large imaginary parts") {
  const cplx z(0.3, 0.7);
  const cplx d = std::log(std::sin(cf::kPi * z));
  const cplx v = cf::log_sin_pi(z);
  CHECK(std::abs(v.real() - d.real()) < 1e-13);
  CHECK(std::abs(std::remainder(v.imag() - d.imag(), 2 * cf::kPi)) < 1e-13);
  CHECK(std::isfinite(cf::log_sin_pi(cplx(0.25, 400.0)).real()));
}

TEST_CASE("bernoulli numbers") {
  CHECK(cf::bernoulli_2k(0) == doctest::Approx(1.0));
  CHECK(cf::bernoulli_2k(1) == doctest::Approx(1.0 / 6.0));
  CHECK(cf::bernoulli_2k(2) == doctest::Approx(-1.0 / 30.0));
  CHECK(cf::bernoulli_2k(10) == doctest::Approx(-174611.0 / 330.0));
}
