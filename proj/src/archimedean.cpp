#include "canonforge/archimedean.hpp"

#include <cmath>

namespace cf {

cplx g_archimedean(double omega, double lambda, cplx mu, double y) {
  if (y < 1.0) return 0.0;
  const double a = 2.0 * lambda * omega - 1.0;
  if (y == 1.0) {
    if (a < 0) throw ValidationError("g_archimedean: singular endpoint y = 1 with 2 lambda omega < 1");
    return a == 0 ? 1.0 / (lambda * std::exp(log_gamma(2.0 * lambda * omega))) : 0.0;
  }
  const double u = std::log(y);
  const cplx pre = std::exp(-std::log(lambda) - log_gamma(2.0 * lambda * omega) + (omega - 0.5 - mu / lambda) * u);
  return pre * std::pow(-std::expm1(-u / lambda), a);
}

// ---- partial fractions ----

namespace {

using Series = std::vector<double>;

Series mul(const Series& a, const Series& b, std::size_t n) {
  Series c(n, 0.0);
  for (std::size_t i = 0; i < std::min(n, a.size()); ++i)
    for (std::size_t j = 0; i + j < n && j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Taylor coefficients up to order n-1 of ((c1+x)(c2+x)/(c3+x))^M
Series pole_series(double c1, double c2, double c3, int M, std::size_t n) {
  Series inv(n);
  for (std::size_t k = 0; k < n; ++k) inv[k] = std::pow(-1.0 / c3, double(k)) / c3;
  const Series base = mul(mul({c1, 1.0}, {c2, 1.0}, n), inv, n);
  Series r(n, 0.0);
  r[0] = 1.0;
  for (int i = 0; i < M; ++i) r = mul(r, base, n);
  return r;
}

}  // namespace

PartialFractions partial_fraction_xy(double omega, int M) {
  if (!(omega > 0)) throw ValidationError("partial_fraction_xy: omega must be positive");
  if (M < 0) throw ValidationError("partial_fraction_xy: nu m_L must be non-negative");
  PartialFractions pf;
  pf.omega = omega;
  if (M == 0) return pf;
  const std::size_t n = std::size_t(M);
  // around s = 1 - omega: s - omega = 1 - 2 omega + x, s - omega - 1 = -2 omega + x, s + omega = 1 + x
  const Series hx = pole_series(1.0 - 2.0 * omega, -2.0 * omega, 1.0, M, n);
  // around s = -omega: s - omega = -2 omega + x, s - omega - 1 = -2 omega - 1 + x, s + omega - 1 = -1 + x
  const Series hy = pole_series(-2.0 * omega, -2.0 * omega - 1.0, -1.0, M, n);
  pf.X.resize(n);
  pf.Y.resize(n);
  for (int k = 1; k <= M; ++k) {
    pf.X[std::size_t(k - 1)] = hx[std::size_t(M - k)];
    pf.Y[std::size_t(k - 1)] = hy[std::size_t(M - k)];
  }
  return pf;
}

cplx PartialFractions::evaluate(cplx s) const {
  cplx r = 1.0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    r += X[k] / std::pow(s + omega - 1.0, double(k + 1));
    r += Y[k] / std::pow(s + omega, double(k + 1));
  }
  return r;
}

// ---- log-grid functions ----

LogGridFunction::LogGridFunction(double h, double u_max, double exponent, std::function<cplx(double)> smooth, cplx delta)
    : h_(h), u_max_(u_max), exponent_(exponent), delta_(delta), has_smooth_(true), analytic_(std::move(smooth)) {}

LogGridFunction::LogGridFunction(double h, double exponent, std::vector<cplx> samples, cplx delta)
    : h_(h), exponent_(exponent), delta_(delta), has_smooth_(true) {
  u_max_ = h * double(samples.size() - 1);
  samples_ = UniformSamples<cplx>(0.0, h, std::move(samples));
}

LogGridFunction LogGridFunction::dirac(double h, double u_max) {
  LogGridFunction f;
  f.h_ = h;
  f.u_max_ = u_max;
  f.delta_ = 1.0;
  return f;
}

cplx LogGridFunction::smooth(double u) const {
  if (!has_smooth_) return 0.0;
  if (u < 0 || u > u_max_ * (1 + 1e-12) + 1e-12)
    throw NumericError("kernel", "log-grid function evaluated outside its coverage [0, " + std::to_string(u_max_) + "]");
  if (analytic_) return analytic_(u);
  return samples_(u);
}

cplx LogGridFunction::operator()(double u) const {
  if (u <= 0 || !has_smooth_) return 0.0;
  return std::pow(u, exponent_) * smooth(u);
}

std::vector<cplx> LogGridFunction::sampled_smooth() const {
  const std::size_t n = std::size_t(std::llround(u_max_ / h_)) + 1;
  std::vector<cplx> v(n, 0.0);
  if (!has_smooth_) return v;
  if (!analytic_) return samples_.values();
  for (std::size_t k = 0; k < n; ++k) v[k] = analytic_(double(k) * h_);
  return v;
}

LogGridFunction LogGridFunction::scaled(cplx c) const {
  LogGridFunction r = *this;
  r.delta_ *= c;
  if (analytic_) {
    auto f = analytic_;
    r.analytic_ = [f, c](double u) { return c * f(u); };
  } else {
    for (auto& v : r.samples_.values()) v *= c;
  }
  return r;
}

LogGridFunction LogGridFunction::plus(const LogGridFunction& g) const {
  if (std::abs(g.h_ - h_) > 1e-15) throw ValidationError("mult_convolve: step mismatch");
  if (!g.has_smooth_) {
    LogGridFunction r = *this;
    r.delta_ += g.delta_;
    return r;
  }
  if (!has_smooth_) {
    LogGridFunction r = g;
    r.delta_ += delta_;
    return r;
  }
  const double k = g.exponent_ - exponent_;
  if (k < -1e-12 || std::abs(k - std::round(k)) > 1e-12)
    throw ValidationError("log-grid sum needs exponents differing by a non-negative integer");
  const double umax = std::min(u_max_, g.u_max_);
  const std::size_t n = std::size_t(std::llround(umax / h_)) + 1;
  std::vector<cplx> v(n);
  const int ki = int(std::lround(k));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = double(i) * h_;
    v[i] = smooth(u) + std::pow(u, double(ki)) * g.smooth(u);
  }
  return LogGridFunction(h_, exponent_, std::move(v), delta_ + g.delta_);
}

LogGridFunction mult_convolve(const LogGridFunction& f, const LogGridFunction& g) {
  if (std::abs(f.step() - g.step()) > 1e-15) throw ValidationError("mult_convolve: step mismatch");
  const double h = f.step();
  const double umax = std::min(f.u_max(), g.u_max());
  LogGridFunction out;
  bool have = false;
  auto accumulate = [&](const LogGridFunction& part) {
    out = have ? out.plus(part) : part;
    have = true;
  };
  // Dirac parts are handled exactly.
  const cplx dd = f.delta() * g.delta();
  if (f.delta() != 0.0 && g.has_smooth()) accumulate(g.scaled(f.delta()));
  if (g.delta() != 0.0 && f.has_smooth()) accumulate(f.scaled(g.delta()));
  if (f.has_smooth() && g.has_smooth()) {
    const double a = f.exponent(), b = g.exponent();
    const std::size_t n = std::size_t(std::llround(umax / h)) + 1;
    std::vector<cplx> v(n);
    const double scale = std::exp(-(a + b + 1.0) * std::log(2.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double x = double(i) * h;
      const RuleD& r = gauss_jacobi(32 + 6 * int(std::ceil(x)), a, b);
      cplx acc = 0.0;
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        const double s = 0.5 * (1.0 + r.x(j));
        acc += r.w(j) * f.smooth(x * (1.0 - s)) * g.smooth(x * s);
      }
      v[i] = scale * acc;
    }
    accumulate(LogGridFunction(h, a + b + 1.0, std::move(v)));
  }
  if (!have) {
    out = LogGridFunction::dirac(h, umax).scaled(0.0);
  }
  if (dd != 0.0) {
    LogGridFunction d = LogGridFunction::dirac(h, umax).scaled(dd);
    out = out.plus(d);
  }
  return out;
}

// ---- assembled G ----

ArchimedeanKernel::ArchimedeanKernel(const SelbergDatum& L, double omega, int nu, double u_max, double h)
    : u_max_(std::ceil(u_max / h - 1e-9) * h) {
  u_max = u_max_;
  if (nu < 1) throw ValidationError("kernel: nu >= 1 required");
  // single gamma factor smooth parts, analytic
  std::vector<LogGridFunction> factors;
  for (const auto& gf : L.gamma) {
    const double lam = gf.lambda;
    const cplx mu = gf.mu;
    const double a = 2.0 * lam * omega - 1.0;
    const cplx pre = std::exp(-std::log(lam) - log_gamma(2.0 * lam * omega));
    factors.emplace_back(h, u_max, a, [=](double u) -> cplx {
      const double ratio = (u == 0.0) ? 1.0 / lam : -std::expm1(-u / lam) / u;
      return pre * std::exp((omega - 0.5 - mu / lam) * u) * std::pow(ratio, a);
    });
  }
  LogGridFunction gt = factors[0];
  for (std::size_t j = 1; j < factors.size(); ++j) gt = mult_convolve(gt, factors[j]);
  LogGridFunction base = gt;
  for (int k = 1; k < nu; ++k) gt = mult_convolve(gt, base);
  gt = gt.scaled(std::exp(-2.0 * nu * omega * std::log(L.Q)));

  const PartialFractions pf = partial_fraction_xy(omega, nu * L.m_L);
  LogGridFunction G = gt;
  if (!pf.X.empty()) {
    LogGridFunction r(h, u_max, 0.0, [pf, omega](double u) -> cplx {
      double fact = 1.0, up = 1.0, acc = 0.0;
      for (std::size_t k = 0; k < pf.X.size(); ++k) {
        if (k > 0) {
          fact *= double(k);
          up *= u;
        }
        acc += (pf.X[k] * std::exp(0.5 * u) + pf.Y[k] * std::exp(-0.5 * u)) * up / fact;
      }
      return acc * std::exp(-omega * u);
    });
    G = gt.plus(mult_convolve(r, gt));
  }
  exponent_ = G.exponent();
  const auto sm = G.sampled_smooth();
  std::vector<double> re(sm.size());
  double mx = 0.0, im = 0.0;
  for (std::size_t i = 0; i < sm.size(); ++i) {
    re[i] = sm[i].real();
    mx = std::max(mx, std::abs(sm[i]));
    im = std::max(im, std::abs(sm[i].imag()));
  }
  imag_residue_ = mx > 0 ? im / mx : 0.0;
  s_ = UniformSamples<double>(0.0, h, std::move(re));
}

double ArchimedeanKernel::smooth(double u) const {
  if (u < 0 || u > u_max_ * (1 + 1e-12))
    throw NumericError("kernel", "G evaluated beyond its grid coverage u_max = " + std::to_string(u_max_));
  return s_(u);
}

double ArchimedeanKernel::operator()(double u) const {
  if (u < 0) return 0.0;
  if (u == 0) {
    if (exponent_ > 0) return 0.0;
    if (exponent_ == 0) return s_(0.0);
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(u, exponent_) * smooth(u);
}

}  // namespace cf
