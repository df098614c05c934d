#pragma once
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "canonforge/special.hpp"

namespace cf {

struct GammaFactor {
  double lambda;
  cplx mu;
};

enum class CoeffKind { zeta, dirichlet, table };

struct SelbergDatum {
  std::string label;
  double Q = 1.0;
  std::vector<GammaFactor> gamma;
  int epsilon = 1;
  int m_L = 0;
  CoeffKind kind = CoeffKind::zeta;
  long discriminant = 1;       // dirichlet: fundamental discriminant D, chi = (D / .)
  std::vector<double> table;   // table: a(1), a(2), ...

  double degree() const;
  double coeff(long n) const;
  // a(0..N) with a(0) = 0.
  std::vector<double> coeff_table(long N) const;
  void validate() const;
};

SelbergDatum zeta_datum();
// Real primitive character attached to a fundamental discriminant.
SelbergDatum dirichlet_datum(long discriminant);
// Parses {"label","Q","gamma":[[lambda,re_mu,im_mu],...],"epsilon","m_L","coeffs":{...}}.
SelbergDatum datum_from_json_text(const std::string& text);
std::string datum_to_json_text(const SelbergDatum& d);
// "zeta" or "chi:D".
SelbergDatum datum_by_name(const std::string& name);

int kronecker_symbol(long D, long n);

// ---- Dirichlet algebra on tables indexed 0..N (index 0 unused) ----

template <typename T>
std::vector<T> dirichlet_convolve(const std::vector<T>& a, const std::vector<T>& b) {
  const std::size_t N = std::min(a.size(), b.size()) - 1;
  std::vector<T> c(N + 1, T(0));
  for (std::size_t d = 1; d <= N; ++d) {
    if (a[d] == T(0)) continue;
    for (std::size_t k = 1; d * k <= N; ++k) c[d * k] += a[d] * b[k];
  }
  return c;
}

template <typename T>
std::vector<T> dirichlet_inverse(const std::vector<T>& a) {
  if (a.size() < 2 || a[1] != T(1)) throw ValidationError("dirichlet_inverse: requires a(1) = 1");
  const std::size_t N = a.size() - 1;
  std::vector<T> b(N + 1, T(0)), acc(N + 1, T(0));
  b[1] = T(1);
  for (std::size_t d = 1; d <= N; ++d) {
    if (d > 1) b[d] = -acc[d];
    if (b[d] == T(0)) continue;
    for (std::size_t k = 2; d * k <= N; ++k) acc[d * k] += a[k] * b[d];
  }
  return b;
}

template <typename T>
std::vector<T> dirichlet_power(const std::vector<T>& a, int k) {
  if (k == 0) throw ValidationError("dirichlet_power: k = 0 (use the identity table)");
  if (a.size() < 2 || a[1] != T(1)) throw ValidationError("dirichlet_power: requires a(1) = 1");
  const std::vector<T> base = k > 0 ? a : dirichlet_inverse(a);
  std::vector<T> r = base;
  for (int i = 1; i < std::abs(k); ++i) r = dirichlet_convolve(r, base);
  return r;
}

// q(n) = n^omega sum_{d | n} a^nu(n/d) a^{-nu}(d) d^{-2 omega}, n = 0..N.
std::vector<double> q_coeffs(const SelbergDatum& L, double omega, int nu, long N);

// ---- completed function ----

struct CompletedValue {
  cplx s;
  cplx xi;          // value = xi * exp(log_scale)
  double log_scale;
  cplx value() const { return xi * std::exp(log_scale); }
};

// L(s) (times (s-1)^{m_L} when with_pole_factor) by Euler-Maclaurin on Hurwitz sums.
cplx l_value(const SelbergDatum& L, cplx s, bool with_pole_factor = false, double tol = 1e-12);
CompletedValue xi_eval(const SelbergDatum& L, cplx s, double tol = 1e-12);
// Complex logarithm of xi (imaginary part modulo 2 pi).
cplx log_xi(const SelbergDatum& L, cplx s, double tol = 1e-12);

}  // namespace cf
