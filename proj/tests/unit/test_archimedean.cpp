#include "doctest.h"

#include <cmath>

#include "canonforge/archimedean.hpp"
#include "oracles.hpp"

using cf::cplx;

TEST_CASE("g vanishes below one") { CHECK(cf::g_archimedean(1.2, 0.5, 0.0, 0.5) == cplx(0.0)); }

TEST_CASE("g at y = 2 by direct substitution") {
  const double expect = 2.0 / std::exp(cf::log_gamma(1.2)) * std::pow(2.0, 0.7) * std::pow(0.75, 0.2);
  CHECK(std::abs(cf::g_archimedean(1.2, 0.5, 0.0, 2.0) - expect) < 1e-13);
}

TEST_CASE("mellin transform of g is a gamma ratio") {
  const double w = 1.2, s = 3.0;
  // y = 1 / v^2 maps (1, inf) to (0, 1)
  auto f = [&](double v) {
    const double y = 1.0 / (v * v);
    return std::real(cf::g_archimedean(w, 0.5, 0.0, y)) * std::pow(y, 0.5 - s) * 2.0 / v;
  };
  const double num = oracle::tanh_sinh(f, 0.0, 1.0, 1e-13);
  const double ratio = std::exp(cf::log_gamma(0.5 * (s - w)) - cf::log_gamma(0.5 * (s + w)));
  CHECK(std::abs(num - ratio) / ratio < 1e-8);
}

TEST_CASE("partial fractions") {
  const double w = 1.2;
  const auto one = cf::partial_fraction_xy(w, 1);
  REQUIRE(one.X.size() == 1);
  CHECK(one.X[0] == doctest::Approx(2 * w * (2 * w - 1)));
  CHECK(one.Y[0] == doctest::Approx(-2 * w * (2 * w + 1)));

  const cplx s(3, 2);
  for (int M : {1, 2, 3}) {
    const auto pf = cf::partial_fraction_xy(w, M);
    const cplx direct = std::pow((s - w) * (s - w - 1.0) / ((s + w) * (s + w - 1.0)), M);
    CHECK(std::abs(pf.evaluate(s) - direct) <= 1e-10 * std::abs(direct));
  }
  const auto none = cf::partial_fraction_xy(w, 0);
  CHECK(none.X.empty());
  CHECK(none.evaluate(s) == cplx(1.0));
  CHECK_THROWS_AS(cf::partial_fraction_xy(0.0, 1), cf::ValidationError);
}

namespace {
const double kH = 1.0 / 256.0, kU = 4.0;
cf::LogGridFunction bump_a() {
  return cf::LogGridFunction(kH, kU, 0.0, [](double u) { return cplx(std::exp(-u) * (1 + u)); });
}
cf::LogGridFunction bump_b() {
  return cf::LogGridFunction(kH, kU, 0.0, [](double u) { return cplx(std::exp(-2 * u) * std::cos(u)); });
}
cf::LogGridFunction bump_c() {
  return cf::LogGridFunction(kH, kU, 0.0, [](double u) { return cplx(1.0 / (1.0 + u * u)); });
}
}  // namespace

TEST_CASE("convolution with the dirac is the identity") {
  const auto f = bump_a();
  const auto d = cf::LogGridFunction::dirac(kH, kU);
  const auto g = cf::mult_convolve(f, d);
  for (double u : {0.1, 1.0, 2.5, 3.9}) CHECK(std::abs(g(u) - f(u)) < 1e-14);
}

TEST_CASE("convolution of two bumps against direct quadrature") {
  const auto c = cf::mult_convolve(bump_a(), bump_b());
  for (double u : {0.3, 1.1, 2.7}) {
    const double direct = oracle::tanh_sinh(
        [u](double v) { return std::exp(-v) * (1 + v) * std::exp(-2 * (u - v)) * std::cos(u - v); }, 0.0, u);
    CHECK(std::abs(c(u).real() - direct) < 1e-6);
  }
}

TEST_CASE("convolution with singular exponents") {
  const double a = 0.2, b = -0.3;
  const cf::LogGridFunction f(kH, kU, a, [](double u) { return cplx(std::exp(-u)); });
  const cf::LogGridFunction g(kH, kU, b, [](double) { return cplx(1.0); });
  const auto c = cf::mult_convolve(f, g);
  const double u = 1.3;
  const double direct = oracle::tanh_sinh(
      [&](double v) { return std::pow(v, a) * std::exp(-v) * std::pow(u - v, b); }, 0.0, u, 1e-12, 10);
  CHECK(std::abs(c(u).real() - direct) < 1e-6);
}

TEST_CASE("convolution is associative") {
  const auto l = cf::mult_convolve(cf::mult_convolve(bump_a(), bump_b()), bump_c());
  const auto r = cf::mult_convolve(bump_a(), cf::mult_convolve(bump_b(), bump_c()));
  for (double u : {0.5, 1.7, 3.0}) CHECK(std::abs(l(u) - r(u)) < 1e-6);
}

TEST_CASE("archimedean kernel of zeta") {
  const auto L = cf::zeta_datum();
  const cf::ArchimedeanKernel G(L, 1.2, 1, 3.0);
  CHECK(G.exponent() == doctest::Approx(0.2));
  CHECK(G.imag_residue() <= 1e-10);
  CHECK(G(0.0) == 0.0);
  CHECK(std::isfinite(G(2.0)));
}
