#include "doctest.h"

#include <cmath>
#include <random>

#include "canonforge/selberg.hpp"
#include "oracles.hpp"

using cf::cplx;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("zeta datum fields") {
  const auto z = cf::zeta_datum();
  CHECK(z.degree() == doctest::Approx(1.0));
  CHECK(z.Q == doctest::Approx(1.0 / std::sqrt(cf::kPi)));
  CHECK(z.m_L == 1);
  CHECK(z.epsilon == 1);
  CHECK(z.coeff(1) == 1.0);
  CHECK(z.coeff(97) == 1.0);
}

TEST_CASE("dirichlet inverse of zeta is the moebius function") {
  const auto a = cf::zeta_datum().coeff_table(30);
  const auto mu = cf::dirichlet_inverse(a);
  CHECK(mu[1] == 1.0);
  CHECK(mu[4] == 0.0);
  CHECK(mu[6] == 1.0);
  CHECK(mu[30] == -1.0);
  CHECK(cf::dirichlet_power(a, 2)[6] == 4.0);
  CHECK(cf::dirichlet_power(a, 1) == a);
}

TEST_CASE("inverse property holds exactly up to 10^4") {
  for (const auto& L : {cf::zeta_datum(), cf::dirichlet_datum(-4), cf::dirichlet_datum(5)}) {
    const auto a = L.coeff_table(10000);
    const auto inv = cf::dirichlet_inverse(a);
    const auto d = cf::dirichlet_convolve(a, inv);
    bool ok = d[1] == 1.0;
    for (std::size_t n = 2; n < d.size(); ++n) ok = ok && d[n] == 0.0;
    CHECK(ok);
    const auto naive = oracle::naive_dirichlet_inverse(L.coeff_table(500));
    for (std::size_t n = 1; n <= 500; ++n) CHECK(naive[n] == inv[n]);
  }
}

TEST_CASE("q coefficients") {
  const auto L = cf::zeta_datum();
  const double w = 1.2;
  const auto q = cf::q_coeffs(L, w, 1, 50);
  CHECK(q[1] == doctest::Approx(1.0));
  for (long p : {2, 3, 5, 7, 47}) CHECK(q[std::size_t(p)] == doctest::Approx(std::pow(p, w) - std::pow(p, -w)));
  // n = 4: divisor sum with moebius, only d = 1 and d = 2 contribute
  const double q4 = std::pow(4.0, w) * (1.0 - std::pow(2.0, -2 * w));
  CHECK(q[4] == doctest::Approx(q4));

  const auto q0 = cf::q_coeffs(L, 0.0, 1, 50);
  CHECK(q0[1] == doctest::Approx(1.0));
  for (std::size_t n = 2; n <= 50; ++n) CHECK(std::abs(q0[n]) < 1e-14);

  const auto qc = cf::q_coeffs(cf::dirichlet_datum(-4), 0.8, 2, 20);
  CHECK(qc[1] == doctest::Approx(1.0));
}

TEST_CASE("kronecker symbols") {
  CHECK(cf::kronecker_symbol(-4, 3) == -1);
  CHECK(cf::kronecker_symbol(-4, 5) == 1);
  CHECK(cf::kronecker_symbol(-4, 2) == 0);
  CHECK(cf::kronecker_symbol(5, 2) == -1);
  CHECK(cf::kronecker_symbol(5, 4) == 1);
  CHECK(cf::kronecker_symbol(8, 3) == -1);
}

TEST_CASE("completed zeta values") {
  const auto L = cf::zeta_datum();
  CHECK(rel(cf::xi_eval(L, 2.0).value(), cplx(1.0471975511965977462)) < 1e-12);
  CHECK(rel(cf::xi_eval(L, cplx(0.5, 3)).value(), cplx(0.80633041451414802115)) < 1e-12);
  CHECK(rel(cf::xi_eval(L, cplx(1.7, -2)).value(), cplx(0.93162671801254942416, -0.10417677969355302494)) < 1e-12);
  CHECK(std::abs(cf::xi_eval(L, 0.0).value() - 1.0) < 1e-12);
  CHECK(std::abs(cf::xi_eval(L, 1.0).value() - 1.0) < 1e-12);
  CHECK(std::abs(cf::xi_eval(L, cplx(0.5, 0)).value().imag()) < 1e-12);
}

TEST_CASE("dirichlet L values") {
  const auto m4 = cf::dirichlet_datum(-4), p5 = cf::dirichlet_datum(5);
  CHECK(rel(cf::l_value(m4, 2.0), cplx(0.91596559417721901505)) < 1e-12);
  CHECK(rel(cf::l_value(m4, cplx(0.5, 2)), cplx(1.07886879376793517759, 0.40127519539587026143)) < 1e-12);
  CHECK(rel(cf::l_value(p5, cplx(0.5, 2)), cplx(0.70600643750771659005, 0.92041925286545056415)) < 1e-12);
}

TEST_CASE("functional equation on 100 random points") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-14.0, 14.0);
  for (const auto& L : {cf::zeta_datum(), cf::dirichlet_datum(-4), cf::dirichlet_datum(5)}) {
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      cplx s(U(rng), U(rng));
      if (std::abs(s) > 20) s *= 19.0 / std::abs(s);
      const cplx a = cf::log_xi(L, s), b = cf::log_xi(L, 1.0 - s);
      const cplx d = std::exp(b - a) * double(L.epsilon);
      worst = std::max(worst, std::abs(1.0 - d));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("functional equation where both sides are summed directly") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> S(-0.45, 1.45), T(-20.0, 20.0);
  for (const auto& L : {cf::zeta_datum(), cf::dirichlet_datum(-4)}) {
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const cplx s(S(rng), T(rng));
      worst = std::max(worst, std::abs(1.0 - std::exp(cf::log_xi(L, 1.0 - s) - cf::log_xi(L, s))));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("completed functions left of the critical strip") {
  const auto L = cf::zeta_datum();
  // mpmath
  CHECK(rel(cf::xi_eval(L, cplx(-3, 5)).value(),
            cplx(0.514295550544373399155, -0.555290543834103332137)) < 1e-11);
  CHECK(rel(cf::xi_eval(L, cplx(-0.4, 7)).value(),
            cplx(0.296407036881503473355, -0.097873275039929683750)) < 1e-11);
  CHECK(rel(cf::xi_eval(cf::dirichlet_datum(-4), cplx(-0.3, 4)).value(),
            cplx(0.190608990336830115750, -0.141446611493572463449)) < 1e-11);
  CHECK_THROWS_AS(cf::dirichlet_datum(7), cf::ValidationError);
  CHECK_THROWS_AS(cf::dirichlet_datum(-16), cf::ValidationError);
  CHECK_NOTHROW(cf::dirichlet_datum(-8));
  CHECK_NOTHROW(cf::dirichlet_datum(12));
}

TEST_CASE("xi is real on the real axis") {
  const auto L = cf::zeta_datum();
  for (int k = 0; k <= 70; ++k) {
    const double s = -3.0 + 0.1 * k;
    const auto v = cf::xi_eval(L, s);
    CHECK(std::abs(v.xi.imag()) <= 1e-10 * std::abs(v.xi));
  }
}

TEST_CASE("datum json round trip and validation") {
  const auto d = cf::dirichlet_datum(-4);
  const auto back = cf::datum_from_json_text(cf::datum_to_json_text(d));
  CHECK(back.label == d.label);
  CHECK(back.Q == doctest::Approx(d.Q));
  CHECK(back.coeff(3) == -1.0);
  CHECK(cf::datum_by_name("chi:-4").coeff(7) == -1.0);
  CHECK_THROWS_AS(cf::datum_by_name("nope"), cf::ValidationError);
  CHECK_THROWS_AS(cf::datum_from_json_text(R"({"label":"x","Q":1,"gamma":[],"epsilon":1,"m_L":0,)"
                                           R"("coeffs":{"kind":"table","table":[2,1]}})"),
                  cf::ValidationError);
}
