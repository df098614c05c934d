#pragma once
#include <functional>
#include <vector>

#include "canonforge/quadrature.hpp"
#include "canonforge/selberg.hpp"

namespace cf {

// g_{omega,lambda,mu}(y); zero for y < 1.
cplx g_archimedean(double omega, double lambda, cplx mu, double y);

struct PartialFractions {
  std::vector<double> X, Y;  // index k-1 holds X_k, Y_k
  double omega = 0.0;
  // 1 + sum_k X_k/(s+omega-1)^k + Y_k/(s+omega)^k
  cplx evaluate(cplx s) const;
};
PartialFractions partial_fraction_xy(double omega, int nu_mL);

// Function of u = log y >= 0 written as delta * (Dirac at 0) + u^exponent * smooth(u).
// The smooth part is either an analytic callback or uniform samples on [0, u_max].
class LogGridFunction {
 public:
  LogGridFunction() = default;
  LogGridFunction(double h, double u_max, double exponent, std::function<cplx(double)> smooth, cplx delta = 0.0);
  LogGridFunction(double h, double exponent, std::vector<cplx> samples, cplx delta = 0.0);
  static LogGridFunction dirac(double h, double u_max);

  double step() const { return h_; }
  double u_max() const { return u_max_; }
  double exponent() const { return exponent_; }
  cplx delta() const { return delta_; }
  bool has_smooth() const { return has_smooth_; }
  cplx smooth(double u) const;
  // Pointwise value of the absolutely continuous part (u > 0).
  cplx operator()(double u) const;
  std::vector<cplx> sampled_smooth() const;

  LogGridFunction scaled(cplx c) const;
  // f + u^k g with k = g.exponent - f.exponent a non-negative integer.
  LogGridFunction plus(const LogGridFunction& g) const;

 private:
  double h_ = 1.0, u_max_ = 0.0, exponent_ = 0.0;
  cplx delta_ = 0.0;
  bool has_smooth_ = false;
  std::function<cplx(double)> analytic_;
  UniformSamples<cplx> samples_;
};

// Additive convolution in log coordinates (multiplicative convolution in y),
// by Gauss-Jacobi product integration on the smooth parts.
LogGridFunction mult_convolve(const LogGridFunction& f, const LogGridFunction& g);

// G(u) = g_L^{omega,nu}(e^u) = u^{P-1} G_s(u), P = nu omega d_L.
class ArchimedeanKernel {
 public:
  ArchimedeanKernel(const SelbergDatum& L, double omega, int nu, double u_max, double h = 1.0 / 1024.0);
  double exponent() const { return exponent_; }
  double u_max() const { return u_max_; }
  double smooth(double u) const;
  double operator()(double u) const;
  double imag_residue() const { return imag_residue_; }
  const std::vector<double>& smooth_samples() const { return s_.values(); }
  double step() const { return s_.step(); }

 private:
  double exponent_, u_max_;
  UniformSamples<double> s_;
  double imag_residue_ = 0.0;
};

}  // namespace cf
