#include "canonforge/hbprobe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cf {

namespace {

std::string regime_of(double omega) {
  return omega > 0.5 ? "unconditional" : "evidence only (conditional regime)";
}

// |Theta| by the log-modulus route, used to confirm a witness independently of theta_eval.
double abs_theta_logs(const Structure& S, cplx z) { return std::exp(S.log_E(-z).real() - S.log_E(z).real()); }

}  // namespace

HBReport hb_scan(const Structure& S, const HBGrid& g) {
  if (!(g.step > 0) || !(g.im_max > 0) || !(g.re_max > g.re_min))
    throw ValidationError("hb_scan: grid needs step > 0, im_max > 0 and re_max > re_min");
  HBReport r;
  r.grid = g;
  r.regime = regime_of(S.omega);
  const long nre = long(std::floor((g.re_max - g.re_min) / g.step + 1e-9)) + 1;
  const long nim = long(std::floor(g.im_max / g.step + 1e-9));
  for (long j = 1; j <= nim; ++j)
    for (long i = 0; i < nre; ++i) {
      const cplx z(g.re_min + double(i) * g.step, double(j) * g.step);
      double a;
      try {
        a = std::abs(theta_eval(S, z, g.e_floor));
      } catch (const NumericError&) {
        ++r.skipped;
        continue;
      }
      ++r.samples;
      if (a > r.max_abs_theta) {
        r.max_abs_theta = a;
        if (a >= 1.0) r.witness = z;
      }
    }
  r.margin = 1.0 - r.max_abs_theta;
  r.consistent = r.max_abs_theta < 1.0;
  if (!r.consistent) r.witness_confirmed = abs_theta_logs(S, r.witness) > 1.0 + 1e-9;
  for (long i = 0; i < nre; ++i) {
    const double u = g.re_min + double(i) * g.step;
    try {
      r.real_axis_residual = std::max(r.real_axis_residual, std::abs(std::abs(theta_eval(S, u, g.e_floor)) - 1.0));
    } catch (const NumericError&) {
      ++r.skipped;
    }
  }
  return r;
}

namespace {

struct AxisValue {
  double v, env, imag;
};

AxisValue axis(const Structure& S, bool use_A, double u) {
  const cplx E = S.E(u), Es = S.E(-u);
  const cplx f = use_A ? 0.5 * (E + Es) : cplx(0.0, 0.5) * (E - Es);
  return {f.real(), std::abs(E), std::abs(f.imag())};
}

std::vector<double> ladder(const Structure& S, bool use_A, double u_max, double tol, double step,
                           std::vector<double>& dips, double& max_imag) {
  std::vector<double> zs;
  if (!use_A) zs.push_back(0.0);
  const long n = long(std::ceil(u_max / step));
  AxisValue prev = axis(S, use_A, use_A ? 0.0 : step * 1e-3);
  double a = use_A ? 0.0 : step * 1e-3;
  double prev_rel = std::abs(prev.v) / prev.env, prev2_rel = prev_rel;
  for (long k = 1; k <= n; ++k) {
    const double b = std::min(u_max, double(k) * step);
    const AxisValue cur = axis(S, use_A, b);
    max_imag = std::max(max_imag, cur.imag / cur.env);
    if ((prev.v < 0) != (cur.v < 0) && prev.v != 0.0) {
      double lo = a, hi = b, flo = prev.v;
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = axis(S, use_A, mid).v;
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      zs.push_back(0.5 * (lo + hi));
    } else {
      const double rel = std::abs(cur.v) / cur.env;
      // local minimum of the relative size without a sign change
      if (prev_rel < 1e-10 && prev_rel < prev2_rel && prev_rel < rel) dips.push_back(a);
    }
    prev2_rel = prev_rel;
    prev_rel = std::abs(cur.v) / cur.env;
    prev = cur;
    a = b;
  }
  return zs;
}

}  // namespace

ZeroLadder zero_scan(const Structure& S, double u_max, double refine_tol, double step) {
  if (!(u_max > 0) || !(refine_tol > 0) || !(step > refine_tol)) throw ValidationError("zero_scan: bad scan parameters");
  ZeroLadder z;
  z.refine_tol = refine_tol;
  z.zeros_A = ladder(S, true, u_max, refine_tol, step, z.suspected_double, z.max_imag);
  z.zeros_B = ladder(S, false, u_max, refine_tol, step, z.suspected_double, z.max_imag);
  // strict alternation: 0 = b_0 < a_1 < b_1 < a_2 < ...
  std::vector<std::pair<double, int>> all;
  for (double x : z.zeros_A) all.push_back({x, 0});
  for (double x : z.zeros_B) all.push_back({x, 1});
  std::sort(all.begin(), all.end());
  for (std::size_t k = 0; k < all.size(); ++k) {
    const int expect = k % 2 == 0 ? 1 : 0;
    if (all[k].second != expect || (k > 0 && all[k].first - all[k - 1].first <= refine_tol)) {
      z.interlace_ok = false;
      z.first_violation = all[k].first;
      break;
    }
  }
  return z;
}

long count_sign_changes(const Structure& S, bool use_A, double u_max, double step) {
  long count = 0;
  double prev = axis(S, use_A, use_A ? 0.0 : step * 1e-3).v;
  const long n = long(std::ceil(u_max / step));
  for (long k = 1; k <= n; ++k) {
    const double cur = axis(S, use_A, std::min(u_max, double(k) * step)).v;
    if ((prev < 0) != (cur < 0)) ++count;
    prev = cur;
  }
  return count;
}

std::vector<double> theta_zeros(const Structure& S, double theta, double u_min, double u_max, double refine_tol,
                                double step) {
  if (!(u_max > u_min) || !(refine_tol > 0) || !(step > refine_tol)) throw ValidationError("theta_zeros: bad scan parameters");
  const cplx rot = std::exp(cplx(0.0, theta));
  auto g = [&](double u) { return (rot * S.E(u)).imag(); };
  std::vector<double> zs;
  const long n = long(std::ceil((u_max - u_min) / step));
  double a = u_min, fa = g(a);
  if (fa == 0.0) zs.push_back(a);
  for (long k = 1; k <= n; ++k) {
    const double b = std::min(u_max, u_min + double(k) * step), fb = g(b);
    if (fb == 0.0) {
      zs.push_back(b);
    } else if (fa != 0.0 && (fa < 0) != (fb < 0)) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > refine_tol) {
        const double mid = 0.5 * (lo + hi), fm = g(mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      zs.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return zs;
}

SThetaValue s_theta(const Structure& S, double theta, cplx z) {
  const cplx i(0.0, 1.0);
  SThetaValue r{std::exp(i * theta) * S.E(z) - std::exp(-i * theta) * S.E(-z), ""};
  if (std::abs(theta - kPi / 2) < 1e-15) r.reduces_to = "2iA";
  if (theta == 0.0) r.reduces_to = "-2iB";
  return r;
}

std::vector<cplx> eigenfunction(const KernelFunction& K, double theta, double gamma, const std::vector<double>& x) {
  const cplx i(0.0, 1.0);
  std::vector<std::size_t> order(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<cplx> f(x.size(), 0.0);
  cplx cum = 0.0;
  double last = 0.0;
  const cplx rot = std::exp(-2.0 * i * theta);
  for (std::size_t k : order) {
    const double xk = x[k];
    if (xk < 0) continue;
    if (xk > K.x_max() * (1 + 1e-12)) throw ValidationError("eigenfunction: grid exceeds kernel coverage");
    if (xk > last) {
      const KQuad q = kernel_quadrature(K, last, xk, {}, 16 + int(std::ceil(std::abs(gamma) * (xk - last))));
      for (std::size_t j = 0; j < q.size(); ++j) cum += q.wk[j] * std::exp(i * gamma * q.w[j]);
      last = xk;
    }
    f[k] = std::exp(-i * gamma * xk) * (1.0 - rot * cum);
  }
  return f;
}

std::vector<ScheduleEntry> parse_schedule(const std::string& text) {
  std::vector<ScheduleEntry> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("schedule: expected omega:nu pairs, got '" + item + "'");
    try {
      std::size_t used = 0;
      const double w = std::stod(item.substr(0, colon), &used);
      const int nu = std::stoi(item.substr(colon + 1));
      out.push_back({w, nu});
    } catch (const std::logic_error&) {
      throw ValidationError("schedule: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("schedule: empty");
  return out;
}

GRHReport grh_evidence(const SelbergDatum& L, const std::vector<ScheduleEntry>& schedule, double t_max,
                       const std::vector<cplx>& z_list, const GRHOptions& opt) {
  if (schedule.empty()) throw ValidationError("grh-evidence: empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const ScheduleEntry& e = schedule[k];
    if (e.nu < 1 || !(e.omega > 0)) throw ValidationError("grh-evidence: need omega > 0 and nu >= 1");
    if (!(e.nu * e.omega * L.degree() > 1))
      throw ValidationError("grh-evidence: nu omega d_L > 1 is required (entry " + std::to_string(k) + ")");
    if (k > 0 && !(e.omega < schedule[k - 1].omega))
      throw ValidationError("grh-evidence: omega_n must be strictly decreasing");
    if (!(e.omega > opt.omega0)) throw ValidationError("grh-evidence: omega_n must exceed omega0");
  }
  for (cplx z : z_list)
    if (!(z.imag() > 0)) throw ValidationError("grh-evidence: z must lie in the upper half-plane");
  GRHReport rep;
  rep.datum = L.label;
  rep.omega0 = opt.omega0;
  rep.z_list = z_list;
  rep.note = "evidence, not proof: finite sweeps cannot certify non-vanishing for all t";
  for (const ScheduleEntry& e : schedule) {
    GRHRun run;
    run.entry = e;
    run.label = regime_of(e.omega);
    StructureFamily fam(L, e.omega, e.nu, t_max, opt.degree, opt.resolve_tol);
    const HamiltonianProfile H = mu_m_gamma(fam.solver(), t_max, opt.dt);
    run.det_min_plus = run.det_min_minus = 1.0;
    for (std::size_t k = 0; k < H.t.size(); ++k) {
      if (!H.resolved[k]) break;
      run.probed_to = H.t[k];
      run.det_min_plus = std::min(run.det_min_plus, std::abs(H.det_plus[k]));
      run.det_min_minus = std::min(run.det_min_minus, std::abs(H.det_minus[k]));
    }
    run.horizon = std::isnan(H.horizon) ? t_max : H.horizon;
    run.tau_probe = H.tau_probe;
    run.completed = std::isnan(H.horizon);
    for (double t = 0.0; t <= run.probed_to + 1e-12; t += opt.j_dt) run.j_t.push_back(t);
    for (cplx z : z_list) {
      std::vector<double> js;
      bool dec = true;
      for (double t : run.j_t) {
        js.push_back(j_eval(fam, t, z, z).real());
        if (js.size() > 1 && !(js.back() < js[js.size() - 2])) dec = false;
      }
      run.j_values.push_back(js);
      run.j_decreasing.push_back(dec);
    }
    rep.runs.push_back(std::move(run));
  }
  return rep;
}

}  // namespace cf
