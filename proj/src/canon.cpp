#include "canonforge/canon.hpp"

#include <algorithm>
#include <cmath>

namespace cf {

namespace {

constexpr cplx I1(0.0, 1.0);

// K on [0, 2 t_max], with room for difference stencils at t_max and the direct route's moments.
double kernel_span(double t_max) { return std::max(2.0 * t_max + 0.1, 0.5); }

}  // namespace

StructureFamily::StructureFamily(const SelbergDatum& L, double omega, int nu, double t_max, int degree,
                                 double resolve_tol)
    : S_{L, omega, nu},
      t_max_(t_max),
      K_(std::make_shared<KernelFunction>(L, omega, nu, kernel_span(t_max))),
      F_(K_, degree, resolve_tol) {
  if (!(t_max >= 0)) throw ValidationError("family: t_max must be >= 0");
}

const RhoDensity& StructureFamily::rho() const {
  std::call_once(rho_once_, [this] { rho_ = std::make_unique<RhoDensity>(S_); });
  return *rho_;
}

double StructureFamily::m(double t) const {
  if (t <= 0) return 1.0;
  const auto s = F_.slice(t);
  return std::exp(s->det_plus.log_abs - s->det_minus.log_abs) * s->det_plus.sign * s->det_minus.sign;
}

EvolvedPair ab_eval(const StructureFamily& fam, double t, cplx z) {
  EvolvedPair r;
  r.t = t;
  r.z = z;
  if (t <= 0) {
    const cplx A0 = fam.A(z), B0 = fam.B(z), c = std::cos(t * z), s = std::sin(t * z);
    r.A = A0 * c + B0 * s;
    r.B = -A0 * s + B0 * c;
    return r;
  }
  const auto sl = fam.solver().slice(t);
  const GalerkinOperator& op = *sl->fine;
  const cplx Pz = op.transform(z, 1), Pmz = op.transform(-z, 1);
  const cplx Mz = op.transform(z, -1), Mmz = op.transform(-z, -1);
  const cplx e = std::exp(I1 * t * z), em = std::exp(-I1 * t * z);
  const cplx Ez = fam.E(z), Emz = fam.E(-z);
  const cplx fA = 0.5 * (Emz * (em - Pmz) + Ez * (e - Pz));
  const cplx fB = I1 * 0.5 * (Ez * (e + Mz) - Emz * (em + Mmz));
  const double m = fam.m(t);
  r.A = m * fA;
  r.B = fB / m;
  r.resolved = sl->resolved;
  return r;
}

namespace {

// int_t^infinity phi^eps(t, x) e^{izx} dx given Ifull = int_0^infinity K e^{izw} dw.
cplx tail_transform(const GalerkinOperator& op, cplx z, int eps, cplx Ifull) {
  const KernelFunction& K = op.kernel();
  const double t = op.t();
  const double az = std::abs(z);
  auto partial = [&](double s) {  // int_0^s K e^{izw}
    cplx acc = 0.0;
    if (s <= 0) return acc;
    const KQuad q = kernel_quadrature(K, 0.0, s, {}, 24 + int(std::ceil(az * s)));
    for (std::size_t k = 0; k < q.size(); ++k) acc += q.wk[k] * std::exp(I1 * z * q.w[k]);
    return acc;
  };
  cplx out = std::exp(-I1 * z * t) * (Ifull - partial(2 * t));
  if (op.dim() == 0) return out;
  const Eigen::VectorXd& c = op.coefficients(eps);
  // g(y) = phi_G(y) e^{-izy} on [-t, t]
  auto g = [&](double y) { return op.expansion(c, y) * std::exp(-I1 * z * y); };
  cplx G1 = 0.0;  // int g
  for (const Panel& P : op.panels()) {
    const RuleD r = gauss_legendre(P.degree + 8, P.a, P.b);
    for (Eigen::Index j = 0; j < r.size(); ++j) G1 += r.w(j) * g(r.x(j));
  }
  // int_0^{2t} K(w) e^{izw} int_{w-t}^{t} g(y) dy dw
  std::vector<double> br;
  for (const Panel& P : op.panels()) br.push_back(P.a + t);
  const KQuad q = kernel_quadrature(K, 0.0, 2 * t, br, 24 + int(std::ceil(az * t)));
  cplx G2 = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double lo = q.w[k] - t;
    cplx inner = 0.0;
    for (const Panel& P : op.panels()) {
      if (P.b <= lo) continue;
      const RuleD r = gauss_legendre(P.degree + 8, std::max(P.a, lo), P.b);
      for (Eigen::Index j = 0; j < r.size(); ++j) inner += r.w(j) * g(r.x(j));
    }
    G2 += q.wk[k] * std::exp(I1 * z * q.w[k]) * inner;
  }
  return out - double(eps) * (Ifull * G1 - G2);
}

}  // namespace

EvolvedPair ab_direct(const StructureFamily& fam, double t, cplx z, double X) {
  const Structure& S = fam.structure();
  if (!(z.imag() > 0.5 + S.omega))
    throw ValidationError("ab_direct: half-line route needs Im z > 1/2 + omega");
  if (t < 0) return ab_eval(fam, t, z);
  const cplx Ifull = fourier_identity(S.L, S.omega, S.nu, z, X).integral;
  EvolvedPair r;
  r.t = t;
  r.z = z;
  const cplx e = std::exp(I1 * z * t), Ez = fam.E(z);
  if (t == 0) {
    r.A = 0.5 * Ez * (e + Ifull);
    r.B = I1 * 0.5 * Ez * (e - Ifull);
    return r;
  }
  const auto sl = fam.solver().slice(t);
  const GalerkinOperator& op = *sl->fine;
  const double m = fam.m(t);
  r.A = 0.5 * m * Ez * (e + tail_transform(op, z, 1, Ifull));
  r.B = I1 * 0.5 / m * Ez * (e - tail_transform(op, z, -1, Ifull));
  r.resolved = sl->resolved;
  return r;
}

double ode_residual(const StructureFamily& fam, double t, cplx z, double dt) {
  if (z == cplx(0.0)) return 0.0;
  const EvolvedPair p = ab_eval(fam, t + dt, z), q = ab_eval(fam, t - dt, z), c = ab_eval(fam, t, z);
  const double g = fam.gamma(t);
  const cplx dA = (p.A - q.A) / (2 * dt), dB = (p.B - q.B) / (2 * dt);
  const cplx rA = z * g * c.B, rB = -z * c.A / g;
  const double num = std::hypot(std::abs(dA - rA), std::abs(dB - rB));
  const double den = std::hypot(std::abs(rA), std::abs(rB));
  return den > 0 ? num / den : num;
}

namespace {

struct Y2 {
  cplx A, B;
};
Y2 operator+(Y2 a, Y2 b) { return {a.A + b.A, a.B + b.B}; }
Y2 operator*(double s, Y2 a) { return {s * a.A, s * a.B}; }

Y2 rhs(const StructureFamily& fam, cplx z, double t, Y2 y) {
  const double g = fam.gamma(t);
  return {z * g * y.B, -z * y.A / g};
}

Y2 rk4(const StructureFamily& fam, cplx z, double t, double h, Y2 y) {
  const Y2 k1 = rhs(fam, z, t, y);
  const Y2 k2 = rhs(fam, z, t + h / 2, y + (h / 2) * k1);
  const Y2 k3 = rhs(fam, z, t + h / 2, y + (h / 2) * k2);
  const Y2 k4 = rhs(fam, z, t + h, y + h * k3);
  return y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

EvolvedPair propagate(const StructureFamily& fam, cplx z, double t_from, double t_to, PropagateOptions opt) {
  if (!(opt.h > 0) || !(opt.h_min > 0) || !(opt.step_tol > 0)) throw ValidationError("propagate: positive steps and tolerance required");
  if (t_from <= 0 && t_to <= 0) return ab_eval(fam, t_to, z);
  // the negative half-line is closed form; start from 0 if the path crosses it
  double t = t_from;
  EvolvedPair start = ab_eval(fam, t, z);
  if (t_from < 0) {
    start = ab_eval(fam, 0.0, z);
    t = 0.0;
  }
  Y2 y{start.A, start.B};
  const double end = std::max(t_to, 0.0);
  const double dir = end >= t ? 1.0 : -1.0;
  double h = opt.h;
  while (dir * (end - t) > 1e-14) {
    double step = dir * std::min(h, dir * (end - t));
    for (;;) {
      const Y2 y1 = rk4(fam, z, t, step, y);
      const Y2 yh = rk4(fam, z, t, step / 2, y);
      const Y2 y2 = rk4(fam, z, t + step / 2, step / 2, yh);
      const double err = std::hypot(std::abs(y1.A - y2.A), std::abs(y1.B - y2.B));
      const double scale = std::max(1.0, std::hypot(std::abs(y2.A), std::abs(y2.B)));
      if (err > opt.step_tol * scale && std::abs(step) / 2 >= opt.h_min) {
        step /= 2;
        continue;
      }
      y = y2;
      t += step;
      // grow back towards the nominal step after easy steps
      h = err < 0.1 * opt.step_tol * scale ? std::min(opt.h, 2 * std::abs(step)) : std::abs(step);
      break;
    }
  }
  if (t_to < 0) {
    // returned to the negative half-line: the closed form is exact there
    return ab_eval(fam, t_to, z);
  }
  EvolvedPair r;
  r.t = t_to;
  r.z = z;
  r.A = y.A;
  r.B = y.B;
  return r;
}

cplx j_eval(const StructureFamily& fam, double t, cplx z, cplx w) {
  const double scale = 1.0 + std::abs(z);
  if (std::abs(w - std::conj(z)) < 1e-10 * scale) {
    // derivative limit in w at conj(z)
    const double h = 1e-4 * scale;
    const EvolvedPair a = ab_eval(fam, t, z), p = ab_eval(fam, t, w + h), q = ab_eval(fam, t, w - h);
    const cplx dA = (p.A - q.A) / (2 * h), dB = (p.B - q.B) / (2 * h);
    return (std::conj(a.A) * dB - dA * std::conj(a.B)) / kPi;
  }
  if (std::abs(w - z) < 1e-14 * scale) {
    const EvolvedPair a = ab_eval(fam, t, z);
    const cplx Et = a.A - I1 * a.B, Es = a.A + I1 * a.B;
    return (std::norm(Et) - std::norm(Es)) / (4 * kPi * z.imag());
  }
  const EvolvedPair a = ab_eval(fam, t, z), b = ab_eval(fam, t, w);
  return (std::conj(a.A) * b.B - b.A * std::conj(a.B)) / (kPi * (w - std::conj(z)));
}

cplx j_increment(const StructureFamily& fam, double t, double s, cplx z, cplx w, int panels) {
  if (panels < 1) throw ValidationError("j_increment: panels >= 1");
  std::vector<double> pts = {t, s};
  const double lo = std::min(t, s), hi = std::max(t, s);
  if (lo < 0 && hi > 0) pts.push_back(0.0);
  for (long n : fam.kernel().singular_indices(0.0, 2 * hi))
    if (0.5 * fam.kernel().log_n(n) > lo && 0.5 * fam.kernel().log_n(n) < hi) pts.push_back(0.5 * fam.kernel().log_n(n));
  std::sort(pts.begin(), pts.end());
  cplx acc = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1];
    for (int p = 0; p < panels; ++p) {
      // gamma has a (tau - a)^{1+p} cusp at singular times: grade the first panel
      const RuleD r = gauss_legendre(8, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        const double tau = r.x(j);
        const EvolvedPair u = ab_eval(fam, tau, z), v = ab_eval(fam, tau, w);
        const double g = fam.gamma(tau);
        acc += r.w(j) * (std::conj(u.A) * v.A / g + std::conj(u.B) * v.B * g);
      }
    }
  }
  const double sign = s >= t ? 1.0 : -1.0;
  return sign * acc / kPi;
}

FieldValue fields_fg(const StructureFamily& fam, double t, double x) {
  const RhoDensity& rho = fam.rho();
  FieldValue f;
  const double tt = std::max(t, 0.0);
  const double r1 = rho(x - t), r2 = rho(-x - t);
  f.F = 0.5 * (r1 + r2);
  f.G = 0.5 * (r1 - r2);
  f.est_error = rho.est_error();
  if (tt <= 0) return f;
  const auto sl = fam.solver().slice(t);
  auto integrals = [&](const GalerkinOperator& op, double& Ip, double& Im) {
    Ip = Im = 0.0;
    const Eigen::VectorXd &cp = op.coefficients(1), &cm = op.coefficients(-1);
    for (const Panel& P : op.panels()) {
      const RuleD r = gauss_legendre(P.degree + 8, P.a, P.b);
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        const double y = r.x(j);
        const double a = rho(x - y), b = rho(-x - y);
        Ip += r.w(j) * (a + b) * op.expansion(cp, y);
        Im += r.w(j) * (a - b) * op.expansion(cm, y);
      }
    }
  };
  double Ip, Im, Jp, Jm;
  integrals(*sl->fine, Ip, Im);
  integrals(*sl->base, Jp, Jm);
  const double m = fam.m(t);
  f.est_error += 0.5 * std::max(std::abs(Ip - Jp) * m, std::abs(Im - Jm) / m);
  f.F = m * (f.F - 0.5 * Ip);
  f.G = (f.G + 0.5 * Im) / m;
  return f;
}

PdeResidual pde_residual(const StructureFamily& fam, double t, double x, double dt, double dx) {
  const FieldValue tp = fields_fg(fam, t + dt, x), tm = fields_fg(fam, t - dt, x);
  const FieldValue xp = fields_fg(fam, t, x + dx), xm = fields_fg(fam, t, x - dx);
  const double g = fam.gamma(t);
  const double Ft = (tp.F - tm.F) / (2 * dt), Gt = (tp.G - tm.G) / (2 * dt);
  const double Fx = (xp.F - xm.F) / (2 * dx), Gx = (xp.G - xm.G) / (2 * dx);
  PdeResidual r;
  r.abs1 = std::abs(Ft + g * Gx);
  r.abs2 = std::abs(Gt + Fx / g);
  const double s1 = std::abs(Ft) + g * std::abs(Gx), s2 = std::abs(Gt) + std::abs(Fx) / g;
  // deep in the decay tail both terms are roundoff; compare absolutely there
  r.r1 = r.abs1 / std::max(s1, 1e-9);
  r.r2 = r.abs2 / std::max(s2, 1e-9);
  return r;
}

}  // namespace cf
