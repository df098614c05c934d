// One PASS/FAIL line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "canonforge/canon.hpp"
#include "canonforge/hbprobe.hpp"
#include "oracles.hpp"

using cf::cplx;

namespace {

constexpr double kOmega = 1.2;
constexpr cplx I1(0.0, 1.0);

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] C%-2d %-38s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

const cf::StructureFamily& family() {
  static const cf::StructureFamily f(cf::zeta_datum(), kOmega, 1, 2.0);
  return f;
}

// shared by criteria 4, 7 and 10
const cf::HamiltonianProfile& sweep() {
  static const cf::HamiltonianProfile H = cf::mu_m_gamma(family().solver(), 2.0, 0.01);
  return H;
}

std::string horizon_note() {
  const auto& H = sweep();
  return fmt("; resolvable horizon t = %.2f, tau_probe = %.2f", H.horizon, H.tau_probe);
}

void c1() {
  Clock c;
  const auto grid = cf::uniform_grid(0.1, 3.0, 0.005);
  const auto e = cf::kernel_explicit(cf::zeta_datum(), kOmega, 2, grid);
  const auto k = cf::kernel_contour(cf::zeta_datum(), kOmega, 2, grid);
  double diff = 0, mx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff = std::max(diff, std::abs(e.values[i] - k.values[i]));
    mx = std::max(mx, std::abs(e.values[i]));
  }
  const double tol = 1e-5 * (1 + mx);
  report(1, "kernel two-route agreement", diff <= tol, fmt("max|diff| = %.3e, tol = %.3e", diff, tol), c.seconds());
}

void c2() {
  Clock c;
  const cplx z(0, 0.5 + kOmega + 1.0);
  const auto r = cf::fourier_identity(cf::zeta_datum(), kOmega, 1, z, 12.0);
  report(2, "fourier identity at z = 2.7i", r.rel_error <= 1e-6, fmt("rel error = %.3e, tol = 1e-6", r.rel_error),
         c.seconds());
}

void c3() {
  Clock c;
  double worst = 0;
  std::string info;
  for (double t : {0.2, 0.3}) {
    // operator side: Galerkin series terms at the doubled resolution
    const auto sl = family().solver().slice(t);
    const auto d = sl->fine->series_terms();
    const auto o = oracle::series_from_traces(oracle::power_traces(family().kernel(), t));
    for (int n = 1; n <= 4; ++n) worst = std::max(worst, std::abs(d[std::size_t(n)] - o[std::size_t(n)]));
    double trunc_p = 0, trunc_m = 0;
    for (int n = 0; n <= 4; ++n) {
      trunc_p += o[std::size_t(n)] * std::pow(-1.0, n);
      trunc_m += o[std::size_t(n)];
    }
    info += fmt("; t=%.1f: det(1+K)=%.6f vs sum_{n<=4}=%.6f", t, sl->det_plus.value(), trunc_p);
    info += fmt(", det(1-K)=%.6f vs %.6f", sl->det_minus.value(), trunc_m);
  }
  report(3, "fredholm series terms d_1..d_4", worst <= 1e-6,
         fmt("max|d_n - oracle| = %.3e over t in {0.2, 0.3}, tol = 1e-6", worst) + info, c.seconds());
}

void c4() {
  Clock c;
  const auto& H = sweep();
  double worst = 0, t_last = 0;
  bool covered = true;
  for (std::size_t k = 0; k < H.t.size() && H.t[k] <= 1.5 + 1e-9; ++k) {
    if (!H.resolved[k]) {
      covered = false;
      continue;
    }
    worst = std::max(worst, std::abs(H.m_detratio[k] - H.m_expint[k]) / H.m_detratio[k]);
    t_last = H.t[k];
  }
  report(4, "two-path m(t) on [0, 1.5]", covered && worst <= 1e-4,
         fmt("max rel diff = %.3e on resolved [0, %.2f], tol = 1e-4", worst, t_last) + horizon_note(), c.seconds());
}

void c5() {
  // A - iB = E holds by construction of the half-line formula at t = 0; the content is
  // that the kernel route reproduces A = (E + E#)/2 and B = i(E - E#)/2 separately
  Clock c;
  double worst = 0, worst_sum = 0;
  for (int k = 0; k < 10; ++k) {
    const cplx z(-9.0 + 2.0 * k, 3.0 + 0.25 * k);
    const auto p = cf::ab_direct(family(), 0.0, z);
    const cplx E = family().E(z);
    worst_sum = std::max(worst_sum, std::abs(p.A - I1 * p.B - E) / std::abs(E));
    worst = std::max({worst, std::abs(p.A - family().A(z)) / std::abs(E), std::abs(p.B - family().B(z)) / std::abs(E)});
  }
  report(5, "reconstruction A - iB = E", std::max(worst, worst_sum) <= 1e-6,
         fmt("max rel |A(0,z) - iB(0,z) - E| = %.3e, max rel component error = %.3e at 10 z, tol = 1e-6", worst_sum,
             worst),
         c.seconds());
}

void c6() {
  Clock c;
  double worst = 0, min_order = std::numeric_limits<double>::infinity();
  for (double t : {0.1, 0.2, 0.25})
    for (cplx z : {cplx(1, 0), cplx(0, 2), cplx(1, 1)}) {
      const double r1 = cf::ode_residual(family(), t, z, 1e-3), r2 = cf::ode_residual(family(), t, z, 5e-4);
      worst = std::max(worst, r1);
      min_order = std::min(min_order, std::log2(r1 / r2));
    }
  report(6, "canonical system residual", worst <= 1e-3 && min_order >= 1.8,
         fmt("max residual = %.3e (tol 1e-3), min observed order = %.2f", worst, min_order), c.seconds());
}

void c7() {
  Clock c;
  const auto& H = sweep();
  std::vector<double> sing = {0.0};
  for (long n : family().kernel().singular_indices(0.0, 4.0)) sing.push_back(0.5 * family().kernel().log_n(n));
  double worst_abs = 0, worst_rel = 0, t_last = 0;
  bool covered = true;
  const double guard = 5 * 0.01;
  for (std::size_t k = 0; k < H.t.size(); ++k) {
    const double t = H.t[k];
    if (t < 0.2 - 1e-9 || t > 1.5 + 1e-9) continue;
    bool near = false;
    for (double s : sing) near = near || std::abs(t - s) < guard;
    if (near) continue;
    const double v[2][3] = {{H.q_plus_A[k], H.q_plus_B[k], H.q_plus_C[k]}, {H.q_minus_A[k], H.q_minus_B[k], H.q_minus_C[k]}};
    bool ok = H.resolved[k];
    for (const auto& row : v)
      for (double q : row) ok = ok && std::isfinite(q);
    if (!ok) {
      covered = false;
      continue;
    }
    t_last = t;
    for (const auto& row : v)
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const double d = std::abs(row[i] - row[j]);
          worst_abs = std::max(worst_abs, d);
          worst_rel = std::max(worst_rel, d / std::max({std::abs(row[i]), std::abs(row[j]), 1.0}));
        }
  }
  report(7, "q triple-route identity on [0.2, 1.5]", covered && worst_abs <= 1e-3,
         fmt("max pairwise |diff| = %.3e (rel %.3e) on resolved [0.2, %.2f], tol = 1e-3", worst_abs, worst_rel, t_last) +
             horizon_note(),
         c.seconds());
}

void c8() {
  Clock c;
  double worst = 0;
  for (double t : {0.1, 0.2, 0.25})
    for (double x : {0.15, 0.4, 0.7}) {
      const auto r = cf::pde_residual(family(), t, x, 1e-3, 1e-3);
      worst = std::max({worst, r.r1, r.r2});
    }
  report(8, "PDE residual", worst <= 1e-3, fmt("max residual = %.3e at 9 (t, x), tol = 1e-3", worst), c.seconds());
}

void c9() {
  Clock c;
  const cf::Structure S{cf::zeta_datum(), kOmega, 1};
  const auto hb = cf::hb_scan(S);
  const auto z = cf::zero_scan(S, 30.0);
  const bool pass = hb.consistent && hb.max_abs_theta < 1 && hb.real_axis_residual <= 1e-9 && z.interlace_ok;
  report(9, "hermite-biehler sampling", pass,
         fmt("max|Theta| = %.5f, real-axis residual = %.2e, ", hb.max_abs_theta, hb.real_axis_residual) +
             std::to_string(z.zeros_A.size()) + " zeros of A / " + std::to_string(z.zeros_B.size()) +
             " of B interlace: " + (z.interlace_ok ? "yes" : "no"),
         c.seconds());
}

void c10() {
  Clock c;
  const auto& H = sweep();
  double min_det = std::numeric_limits<double>::infinity(), max_eig = 0, t_last = 0;
  bool covered = true;
  for (std::size_t k = 0; k < H.t.size(); ++k) {
    if (!H.resolved[k]) {
      covered = false;
      continue;
    }
    min_det = std::min({min_det, std::abs(H.det_plus[k]), std::abs(H.det_minus[k])});
    max_eig = std::max(max_eig, H.max_abs_eigenvalue[k]);
    t_last = H.t[k];
  }
  // J(t; i, i) on the resolved part of the grid
  const cplx z(0, 1);
  bool decreasing = true;
  double worst_inc = 0, prev = cf::j_eval(family(), 0.0, z, z).real();
  for (double t = 0.05; t <= t_last + 1e-9; t += 0.05) {
    const double j = cf::j_eval(family(), t, z, z).real();
    decreasing = decreasing && j < prev;
    const double inc = cf::j_increment(family(), t - 0.05, t, z, z).real();
    worst_inc = std::max(worst_inc, std::abs(inc - (prev - j)) / std::abs(prev - j));
    prev = j;
  }
  const bool pass = covered && max_eig < 1 && min_det > 0.1 && decreasing && worst_inc <= 1e-4;
  report(10, "operator norm, det bound and J on [0, 2]", pass,
         fmt("on resolved [0, %.2f]: max|lambda| = %.6f, min|det| = %.3e", t_last, max_eig, min_det) +
             "; J(t;i,i) decreasing: " + (decreasing ? "yes" : "no") +
             fmt(", max increment rel error = %.2e", worst_inc) + horizon_note(),
         c.seconds());
}

void c11() {
  Clock c;
  const auto a = cf::zeta_datum().coeff_table(10000);
  const auto d = cf::dirichlet_convolve(a, cf::dirichlet_inverse(a));
  bool delta = d[1] == 1.0;
  for (std::size_t n = 2; n < d.size(); ++n) delta = delta && d[n] == 0.0;
  const auto q = cf::q_coeffs(cf::zeta_datum(), kOmega, 1, 97);
  // brute-force divisor sums with the naive moebius recursion
  const auto mu = oracle::naive_dirichlet_inverse(cf::zeta_datum().coeff_table(97));
  double worst = std::abs(q[1] - 1.0);
  for (long p = 2; p <= 97; ++p) {
    bool prime = true;
    for (long f = 2; f * f <= p; ++f) prime = prime && p % f != 0;
    if (!prime) continue;
    double brute = 0;
    for (long dd = 1; dd <= p; ++dd)
      if (p % dd == 0) brute += mu[std::size_t(dd)] * std::pow(double(dd), -2 * kOmega);
    brute *= std::pow(double(p), kOmega);
    const double closed = std::pow(double(p), kOmega) - std::pow(double(p), -kOmega);
    worst = std::max({worst, std::abs(q[std::size_t(p)] - brute) / closed, std::abs(q[std::size_t(p)] - closed) / closed});
  }
  report(11, "dirichlet algebra", delta && worst <= 1e-13,
         std::string("a*a^-1 = delta to 1e4: ") + (delta ? "exact" : "violated") +
             fmt(", max rel |q - brute force| = %.2e", worst),
         c.seconds());
}

}  // namespace

int main() {
  Clock total;
  for (auto f : {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11}) {
    try {
      f();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d of 11 criteria failed (%.1fs)\n", failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
