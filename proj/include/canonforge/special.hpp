#pragma once
#include <complex>
#include <stdexcept>
#include <string>

namespace cf {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Numeric failure carrying the stage that produced it and the violated tolerance.
struct NumericError : std::runtime_error {
  std::string stage;
  double tolerance;
  NumericError(std::string stage_, const std::string& what, double tol = 0.0)
      : std::runtime_error(stage_ + ": " + what), stage(std::move(stage_)), tolerance(tol) {}
};

// Precondition or configuration failure.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// log Gamma(z), continuous in z away from the negative real axis; the imaginary
// part is only meaningful modulo 2 pi.
cplx log_gamma(cplx z);

// Gamma(z) returned as exp(log_scale) * mantissa, |mantissa| = 1.
struct ScaledGamma {
  cplx mantissa;
  double log_scale;
  cplx value() const { return mantissa * std::exp(log_scale); }
};
ScaledGamma complex_gamma(cplx z);

double log_gamma(double x);

// log sin(pi z) without overflow for large |Im z|.
cplx log_sin_pi(cplx z);

// Bernoulli numbers B_{2k}, k = 0..10.
double bernoulli_2k(int k);

}  // namespace cf
