#include "canonforge/special.hpp"

#include <array>
#include <cmath>

namespace cf {
namespace {

// Godfrey's coefficients, g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

constexpr std::array<double, 11> kB2k = {1.0,
                                         1.0 / 6.0,
                                         -1.0 / 30.0,
                                         1.0 / 42.0,
                                         -1.0 / 30.0,
                                         5.0 / 66.0,
                                         -691.0 / 2730.0,
                                         7.0 / 6.0,
                                         -3617.0 / 510.0,
                                         43867.0 / 798.0,
                                         -174611.0 / 330.0};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

cplx lanczos_log_gamma(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) x += kLanczos[k] / (z + double(k));
  const cplx t = z + kLanczosG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Stirling series, accurate to double precision once |z| >= 12.
cplx stirling_log_gamma(cplx z) {
  cplx s = (z - 0.5) * std::log(z) - z + kHalfLog2Pi;
  const cplx iz = 1.0 / z, iz2 = iz * iz;
  cplx p = iz;
  for (int k = 1; k <= 10; ++k) {
    s += kB2k[k] / (2.0 * k * (2.0 * k - 1.0)) * p;
    p *= iz2;
  }
  return s;
}

cplx log_gamma_right(cplx z) {
  // Re z >= 1/2
  if (std::abs(z) >= 12.0) return stirling_log_gamma(z);
  return lanczos_log_gamma(z);
}

}  // namespace

double bernoulli_2k(int k) { return kB2k.at(std::size_t(k)); }

cplx log_sin_pi(cplx z) {
  const double y = z.imag();
  if (std::abs(y) < 20.0) return std::log(std::sin(kPi * z));
  // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; keep the dominant exponential symbolic.
  const cplx i(0.0, 1.0);
  if (y > 0) return -i * kPi * z - std::log(2.0 * i) + std::log(1.0 - std::exp(2.0 * i * kPi * z)) + i * kPi;
  return i * kPi * z - std::log(2.0 * i) + std::log(1.0 - std::exp(-2.0 * i * kPi * z));
}

cplx log_gamma(cplx z) {
  if (z.real() >= 0.5) return log_gamma_right(z);
  const double re = z.real();
  if (z.imag() == 0.0 && re == std::floor(re)) throw ValidationError("complex_gamma: pole at non-positive integer");
  return std::log(kPi) - log_sin_pi(z) - log_gamma_right(1.0 - z);
}

double log_gamma(double x) { return std::lgamma(x); }

ScaledGamma complex_gamma(cplx z) {
  const cplx lg = log_gamma(z);
  return {std::polar(1.0, lg.imag()), lg.real()};
}

}  // namespace cf
