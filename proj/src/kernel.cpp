#include "canonforge/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace cf {

void require_continuous(const SelbergDatum& L, double omega, int nu) {
  if (!(omega > 0)) throw ValidationError("omega must be positive");
  if (nu < 1) throw ValidationError("nu must be a positive integer");
  const double P = nu * omega * L.degree();
  if (!(P > 1.0))
    throw ValidationError("continuity requires nu*omega*d_L > 1 (got " + std::to_string(P) + ")");
}

cplx Structure::log_E(cplx z) const { return double(nu) * log_xi(L, 0.5 + omega - cplx(0, 1) * z); }

cplx theta_eval(const Structure& S, cplx z, double e_floor) {
  const cplx i(0, 1);
  const CompletedValue den = xi_eval(S.L, 0.5 + S.omega - i * z);
  if (std::abs(den.xi) < e_floor)
    throw NumericError("kernel", "theta_eval: |E(z)| below floor", 1e-12);
  const CompletedValue num = xi_eval(S.L, 0.5 - S.omega - i * z);
  const cplx lr = std::log(num.xi) - std::log(den.xi) + (num.log_scale - den.log_scale);
  const double sign = (S.nu % 2 == 1 && S.L.epsilon == -1) ? -1.0 : 1.0;
  return sign * std::exp(double(S.nu) * lr);
}

// ---- rho ----

RhoDensity::RhoDensity(const Structure& S, double c, double du, double tol) : c_(c), du_(du) {
  const cplx i(0, 1);
  double mx = 0.0;
  int quiet = 0;
  std::vector<cplx> pos, neg;
  for (long j = 0;; ++j) {
    const double u = double(j) * du;
    const cplx ep = S.E(u + i * c), en = S.E(-u + i * c);
    pos.push_back(ep);
    neg.push_back(en);
    mx = std::max(mx, std::abs(ep));
    quiet = (std::abs(ep) < tol * mx && std::abs(en) < tol * mx) ? quiet + 1 : 0;
    if (quiet >= 16) break;
    if (u > 400) throw NumericError("kernel", "rho_density: E does not decay along the contour", tol);
  }
  U_ = double(pos.size() - 1) * du;
  tail_ = std::abs(pos.back()) * 4.0 / (kPi * kPi) / std::max(mx, 1e-300);
  e_.resize(2 * pos.size() - 1);
  // interleaved: index 0 -> u=0, then (+u, -u) pairs
  e_[0] = pos[0];
  for (std::size_t j = 1; j < pos.size(); ++j) {
    e_[2 * j - 1] = pos[j];
    e_[2 * j] = neg[j];
  }
}

cplx RhoDensity::complex_value(double x) const {
  cplx acc = e_[0];
  const std::size_t n = (e_.size() + 1) / 2;
  for (std::size_t j = 1; j < n; ++j) {
    const double u = double(j) * du_;
    acc += e_[2 * j - 1] * std::polar(1.0, -x * u) + e_[2 * j] * std::polar(1.0, x * u);
  }
  return acc * du_ * std::exp(c_ * x) / (2.0 * kPi);
}

double RhoDensity::operator()(double x) const { return complex_value(x).real(); }

// ---- explicit kernel ----

KernelFunction::KernelFunction(const SelbergDatum& L, double omega, int nu, double x_max)
    : S_{L, omega, nu}, x_max_(x_max), G_(L, omega, nu, std::max(x_max, 1.0 / 1024.0)) {
  L.validate();
  // the coefficient table has e^{x_max} entries
  if (!(x_max > 0) || x_max > 16.0) throw ValidationError("kernel: x_max must lie in (0, 16]");
  const long N = long(std::floor(std::exp(x_max) * (1.0 + 1e-14))) + 1;
  const auto q = q_coeffs(L, omega, nu, N);
  const double sign = (nu % 2 == 1 && L.epsilon == -1) ? -1.0 : 1.0;
  c_.assign(q.size(), 0.0);
  logn_.assign(q.size(), 0.0);
  for (std::size_t n = 1; n < q.size(); ++n) {
    c_[n] = sign * q[n] / std::sqrt(double(n));
    logn_[n] = std::log(double(n));
  }
}

double KernelFunction::operator()(double x) const {
  if (x < 0) return 0.0;
  if (x > x_max_ * (1 + 1e-12) + 1e-12)
    throw NumericError("kernel", "K evaluated beyond coverage x_max = " + std::to_string(x_max_));
  double acc = 0.0;
  for (std::size_t n = 1; n < c_.size() && logn_[n] <= x; ++n)
    if (c_[n] != 0.0) acc += c_[n] * G_(x - logn_[n]);
  return acc;
}

double KernelFunction::regular(double x, long skip) const {
  if (x < 0) return 0.0;
  double acc = 0.0;
  for (std::size_t n = 1; n < c_.size() && logn_[n] <= x; ++n)
    if (long(n) != skip && c_[n] != 0.0) acc += c_[n] * G_(x - logn_[n]);
  return acc;
}

double KernelFunction::singular_smooth(double x, long n) const {
  return c_[std::size_t(n)] * G_.smooth(std::max(0.0, x - logn_[std::size_t(n)]));
}

double KernelFunction::left_limit(double x) const {
  if (x <= 0) return 0.0;
  double acc = 0.0;
  for (std::size_t n = 1; n < c_.size() && logn_[n] < x - 1e-12; ++n)
    if (c_[n] != 0.0) acc += c_[n] * G_(x - logn_[n]);
  return acc;
}

std::vector<long> KernelFunction::singular_indices(double a, double b) const {
  std::vector<long> out;
  for (std::size_t n = 1; n < c_.size() && logn_[n] <= b; ++n)
    if (logn_[n] > a && c_[n] != 0.0) out.push_back(long(n));
  return out;
}

std::vector<double> uniform_grid(double x_min, double x_max, double h) {
  if (!(h > 0) || x_max < x_min) throw ValidationError("grid: need h > 0 and x_max >= x_min");
  const long n = long(std::floor((x_max - x_min) / h + 1e-9)) + 1;
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) g[std::size_t(k)] = x_min + double(k) * h;
  return g;
}

KernelProfile kernel_explicit(const SelbergDatum& L, double omega, int nu, const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("kernel_explicit: empty grid");
  const double xmax = std::max(*std::max_element(grid.begin(), grid.end()), 0.0);
  KernelFunction K(L, omega, nu, xmax);
  KernelProfile pr;
  pr.label = L.label;
  pr.omega = omega;
  pr.nu = nu;
  pr.route = "explicit";
  pr.x = grid;
  pr.imag_residue = K.G().imag_residue();
  const double h = grid.size() > 1 ? std::abs(grid[1] - grid[0]) : 1.0;
  const double P = nu * omega * L.degree();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    pr.values.push_back(K(x));
    double mag = 0.0;
    for (long n = 1; n <= K.n_max() && K.log_n(n) <= x; ++n) mag += std::abs(K.coefficient(n) * K.G()(x - K.log_n(n)));
    pr.est_error.push_back(1e-13 * mag + 1e-15);
    if (P <= 1.3)
      for (long n = 1; n <= K.n_max(); ++n)
        if (std::abs(x - K.log_n(n)) < 0.5 * h) pr.flagged.push_back(i);
  }
  const double lo = *std::min_element(grid.begin(), grid.end());
  for (long n : K.singular_indices(lo - 1e-12, xmax)) {
    const double s = K.log_n(n);
    pr.singular_points.push_back(s);
    pr.limits.push_back({s, K.left_limit(s), K(s)});
  }
  return pr;
}

// ---- contour route ----

GammaAsymptotics gamma_asymptotics(const Structure& S) {
  const double w = S.omega;
  double sl = 0.0, smu = 0.0;
  for (const auto& g : S.L.gamma) {
    sl += g.lambda * std::log(g.lambda);
    smu += 2.0 * g.mu.real() - 1.0;
  }
  const double d = S.L.degree();
  GammaAsymptotics a;
  a.P = S.P();
  a.C0 = std::exp(S.nu * (-2.0 * w * std::log(S.L.Q) - 2.0 * w * sl));
  a.kappa = -S.nu * (w * d / 2.0 + w * (smu + 4.0 * S.L.m_L));
  return a;
}

KernelProfile kernel_contour(const SelbergDatum& L, double omega, int nu, const std::vector<double>& grid,
                             ContourOptions opt) {
  L.validate();
  const Structure S{L, omega, nu};
  const double P = S.P();
  if (P <= 1.2)
    throw ValidationError("kernel_contour: nu*omega*d_L = " + std::to_string(P) +
                          " <= 1.2, truncation error uncontrollable");
  const double c = opt.c > 0 ? opt.c : 0.5 + omega + 1.0;
  if (!(c > 0.5 + omega)) throw ValidationError("kernel_contour: contour height must exceed 1/2 + omega");
  const double xmax = std::max(*std::max_element(grid.begin(), grid.end()), 0.0);
  const GammaAsymptotics ga = gamma_asymptotics(S);
  const double beta = opt.beta, kp = ga.kappa + P * beta;
  const long M = long(std::ceil(std::exp(xmax + 3.0)));
  const auto q = q_coeffs(L, omega, nu, M);
  const double sign = (nu % 2 == 1 && L.epsilon == -1) ? -1.0 : 1.0;
  std::vector<double> cn(std::size_t(M) + 1, 0.0), ln(std::size_t(M) + 1, 0.0);
  for (long n = 1; n <= M; ++n) {
    cn[std::size_t(n)] = sign * q[std::size_t(n)] / std::sqrt(double(n));
    ln[std::size_t(n)] = std::log(double(n));
  }
  const cplx i(0, 1);
  const long nu_nodes = long(std::llround(opt.U / opt.du));
  std::vector<cplx> res(std::size_t(nu_nodes) + 1);
  for (long j = 0; j <= nu_nodes; ++j) {
    const double u = double(j) * opt.du;
    const cplx z(u, c);
    const cplx th = theta_eval(S, z);
    const cplx b = beta - i * z;
    const cplx shape = ga.C0 * (std::pow(b, -P) + kp * std::pow(b, -P - 1.0));
    cplx dir = 0.0;
    for (long n = 1; n <= M; ++n) dir += cn[std::size_t(n)] * std::exp(i * z * ln[std::size_t(n)]);
    res[std::size_t(j)] = th - dir * shape;
  }
  // tail bounds: residual ~ u^{-P-2}; terms n > M oscillate at frequency >= log M - x
  const double r_end = std::abs(res.back());
  double rest = 0.0;
  {
    const long M2 = 50 * M;
    const auto q2 = q_coeffs(L, omega, nu, M2);
    for (long n = M + 1; n <= M2; ++n) rest += std::abs(q2[std::size_t(n)]) * std::pow(double(n), -0.5 - c);
  }
  const double gammaP = std::exp(log_gamma(P)), gammaP1 = std::exp(log_gamma(P + 1.0));

  KernelProfile pr;
  pr.label = L.label;
  pr.omega = omega;
  pr.nu = nu;
  pr.route = "contour";
  pr.x = grid;
  double imag = 0.0, mag = 0.0;
  for (double x : grid) {
    if (x < 0) {
      pr.values.push_back(0.0);
      pr.est_error.push_back(0.0);
      continue;
    }
    cplx acc = 0.5 * res[0];
    for (long j = 1; j <= nu_nodes; ++j) {
      const double w = (j == nu_nodes) ? 0.5 : 1.0;
      acc += w * res[std::size_t(j)] * std::polar(1.0, -x * double(j) * opt.du);
    }
    acc *= opt.du;
    const double ecx = std::exp(c * x);
    double model = 0.0;
    for (long n = 1; n <= M && ln[std::size_t(n)] < x; ++n) {
      const double u = x - ln[std::size_t(n)];
      model += cn[std::size_t(n)] * ga.C0 * (std::pow(u, P - 1.0) / gammaP + kp * std::pow(u, P) / gammaP1) *
               std::exp(-beta * u);
    }
    const double val = model + ecx / kPi * acc.real();
    pr.values.push_back(val);
    imag = std::max(imag, std::abs(ecx / kPi * acc.imag()));
    mag = std::max(mag, std::abs(val));
    const double tail = ecx / kPi *
                        (r_end * opt.U / (P + 1.0) +
                         rest * ga.C0 * std::pow(opt.U, -P) / std::max(std::log(double(M)) - x, 1.0));
    pr.est_error.push_back(tail);
  }
  // the symmetric fold makes the result real by construction; report the raw one-sided imaginary part scale
  pr.imag_residue = 0.0;
  (void)imag;
  (void)mag;
  return pr;
}

// ---- Fourier identity ----

FourierIdentity fourier_identity(const SelbergDatum& L, double omega, int nu, cplx z, double X) {
  const Structure S{L, omega, nu};
  if (!(z.imag() > 0.5 + omega)) throw ValidationError("fourier_identity: requires Im z > 1/2 + omega");
  ArchimedeanKernel G(L, omega, nu, X);
  const double h = G.step();
  const double p = G.exponent();
  const long nT = long(std::llround(G.u_max() / h));
  // C(T) = int_0^T G(u) e^{izu} du = T^{p+1} C_s(T)
  std::vector<cplx> Cs(std::size_t(nT) + 1);
  const cplx i(0, 1);
  cplx run = 0.0;
  {
    const RuleD r0 = gauss_jacobi_left(20, p, 0.0, h);
    for (Eigen::Index k = 0; k < r0.size(); ++k) run += r0.w(k) * G.smooth(r0.x(k)) * std::exp(i * z * r0.x(k));
  }
  Cs[0] = G.smooth(0.0) / (p + 1.0);
  Cs[1] = run / std::pow(h, p + 1.0);
  const RuleD& gl = gauss_legendre(8);
  for (long k = 2; k <= nT; ++k) {
    const double a = double(k - 1) * h;
    for (Eigen::Index j = 0; j < gl.size(); ++j) {
      const double u = a + 0.5 * h * (gl.x(j) + 1.0);
      run += 0.5 * h * gl.w(j) * G(u) * std::exp(i * z * u);
    }
    Cs[std::size_t(k)] = run / std::pow(double(k) * h, p + 1.0);
  }
  UniformSamples<cplx> Ci(0.0, h, std::move(Cs));
  const long N = long(std::floor(std::exp(X)));
  const auto q = q_coeffs(L, omega, nu, N);
  const double sign = (nu % 2 == 1 && L.epsilon == -1) ? -1.0 : 1.0;
  cplx acc = 0.0;
  for (long n = N; n >= 1; --n) {
    const double ln = std::log(double(n));
    const double T = std::max(X - ln, 0.0);
    if (T <= 0) continue;
    acc += q[std::size_t(n)] / std::sqrt(double(n)) * std::exp(i * z * ln) * std::pow(T, p + 1.0) * Ci(T);
  }
  acc *= sign;
  FourierIdentity f;
  f.integral = acc;
  f.theta = theta_eval(S, z);
  f.rel_error = std::abs(acc - f.theta) / std::abs(f.theta);
  f.terms = N;
  return f;
}

}  // namespace cf
