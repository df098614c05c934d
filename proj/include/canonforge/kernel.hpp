#pragma once
#include <memory>
#include <string>
#include <vector>

#include "canonforge/archimedean.hpp"
#include "canonforge/selberg.hpp"

namespace cf {

// The completed data attached to (L, omega, nu): E(z) = xi(1/2 + omega - iz)^nu.
struct Structure {
  SelbergDatum L;
  double omega;
  int nu;
  double P() const { return nu * omega * L.degree(); }
  // log E(z), imaginary part modulo 2 pi.
  cplx log_E(cplx z) const;
  cplx E(cplx z) const { return std::exp(log_E(z)); }
  cplx A(cplx z) const { return 0.5 * (E(z) + E(-z)); }
  cplx B(cplx z) const { return cplx(0.0, 0.5) * (E(z) - E(-z)); }
};

void require_continuous(const SelbergDatum& L, double omega, int nu);

// e_floor bounds the non-archimedean factor of E (its zeros are the zeros of E).
cplx theta_eval(const Structure& S, cplx z, double e_floor = 1e-12);

// rho(x) = (1/2 pi) int E(u + ic) e^{-ix(u+ic)} du by the trapezoid rule;
// E decays like exp(-pi nu |u| / 4), so the rule converges spectrally.
class RhoDensity {
 public:
  explicit RhoDensity(const Structure& S, double c = 0.0, double du = 0.125, double tol = 1e-15);
  double operator()(double x) const;
  cplx complex_value(double x) const;
  double truncation() const { return U_; }
  double est_error() const { return tail_; }

 private:
  double c_, du_, U_ = 0.0, tail_ = 0.0;
  std::vector<cplx> e_;  // E(u_j + ic), u_j = j du, j >= 0
};

// Explicit-formula kernel K(x) = eps^nu sum_{n <= e^x} q(n) n^{-1/2} G(x - log n).
class KernelFunction {
 public:
  KernelFunction(const SelbergDatum& L, double omega, int nu, double x_max);

  double operator()(double x) const;
  // K with the n-th term removed, and the smooth factor of the n-th term:
  // K = regular(x, n) + (x - log n)^p * singular_smooth(x, n).
  double regular(double x, long n) const;
  double singular_smooth(double x, long n) const;
  double left_limit(double x) const;

  double exponent() const { return G_.exponent(); }
  double x_max() const { return x_max_; }
  long n_max() const { return long(c_.size()) - 1; }
  double coefficient(long n) const { return c_[std::size_t(n)]; }
  double log_n(long n) const { return logn_[std::size_t(n)]; }
  const ArchimedeanKernel& G() const { return G_; }
  const Structure& structure() const { return S_; }
  // log n (n >= 1 with nonzero coefficient) in (a, b], increasing.
  std::vector<long> singular_indices(double a, double b) const;

 private:
  Structure S_;
  double x_max_;
  std::vector<double> c_, logn_;
  ArchimedeanKernel G_;
};

struct SingularLimit {
  double x, left, right;
};

struct KernelProfile {
  std::string label;
  double omega = 0.0;
  int nu = 1;
  std::string route;
  std::vector<double> x, values, est_error;
  std::vector<double> singular_points;
  std::vector<SingularLimit> limits;
  std::vector<std::size_t> flagged;  // near-singular grid indices
  double imag_residue = 0.0;
};

std::vector<double> uniform_grid(double x_min, double x_max, double h);

KernelProfile kernel_explicit(const SelbergDatum& L, double omega, int nu, const std::vector<double>& grid);

struct ContourOptions {
  double c = -1.0;         // default 1/2 + omega + 1
  double U = 2000.0;
  double du = 0.25;
  double beta = 1.0;
};
KernelProfile kernel_contour(const SelbergDatum& L, double omega, int nu, const std::vector<double>& grid,
                             ContourOptions opt = {});

// Large-|z| constants of the gamma ratio: Ghat(z) ~ C0 (-iz)^{-P} (1 + kappa / (-iz)).
struct GammaAsymptotics {
  double P, C0, kappa;
};
GammaAsymptotics gamma_asymptotics(const Structure& S);

struct FourierIdentity {
  cplx integral, theta;
  double rel_error;
  long terms;
};
// int_0^infinity K(x) e^{izx} dx evaluated term-wise up to x = X.
FourierIdentity fourier_identity(const SelbergDatum& L, double omega, int nu, cplx z, double X);

}  // namespace cf
