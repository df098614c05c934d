#include "canonforge/kquad.hpp"

#include <algorithm>
#include <cmath>

namespace cf {

void graded_gauss(double a, double b, double s, int nodes, std::vector<double>& x, std::vector<double>& w) {
  const RuleD& r = gauss_legendre(nodes);
  auto panel = [&](double l, double h) {
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      x.push_back(0.5 * (l + h) + 0.5 * (h - l) * r.x(j));
      w.push_back(0.5 * (h - l) * r.w(j));
    }
  };
  const double delta = a - s;
  if (!(delta > 0) || delta >= b - a) {
    panel(a, b);
    return;
  }
  double l = a, width = delta;
  while (l < b) {
    const double h = std::min(b, l + width);
    if (b - h < 0.5 * width) {
      panel(l, b);
      break;
    }
    panel(l, h);
    l = h;
    width *= 2.0;
  }
}

KQuad kernel_quadrature(const KernelFunction& K, double a, double b, std::vector<double> breaks, int nodes,
                        int power) {
  KQuad q;
  const double lo = std::max(a, 0.0), hi = b;
  if (!(hi > lo)) return q;
  if (hi > K.x_max() * (1 + 1e-12) + 1e-12)
    throw NumericError("fredholm", "kernel quadrature beyond kernel coverage x_max = " + std::to_string(K.x_max()));
  const double tol = 1e-12;
  std::vector<double> pts = {lo, hi};
  for (double x : breaks)
    if (x > lo && x < hi) pts.push_back(x);
  const std::vector<long> sing = K.singular_indices(-1.0, hi);
  for (long n : sing)
    if (K.log_n(n) > lo && K.log_n(n) < hi) pts.push_back(K.log_n(n));
  std::sort(pts.begin(), pts.end());
  std::vector<double> br;
  for (double x : pts)
    if (br.empty() || x - br.back() > tol * (1.0 + std::abs(x))) br.push_back(x);
  if (br.back() < hi) br.back() = hi;

  const double p = K.exponent();
  std::vector<double> gx, gw;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double L = br[k], R = br[k + 1];
    if (R - L <= 0) continue;
    long js = 0;          // term singular at L
    double s_reg = -1.0;  // nearest singular point strictly left of L
    bool has_reg = false;
    for (long n : sing) {
      const double ln = K.log_n(n);
      if (std::abs(ln - L) <= tol * (1.0 + L)) js = n;
      else if (ln < L) {
        s_reg = ln;
        has_reg = true;
      }
    }
    // regular part
    gx.clear();
    gw.clear();
    if (has_reg) {
      graded_gauss(L, R, s_reg, nodes, gx, gw);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const double r = js ? K.regular(gx[i], js) : K(gx[i]);
        q.w.push_back(gx[i]);
        q.wk.push_back(gw[i] * (power == 1 ? r : r * r));
      }
    }
    if (js) {
      const RuleD rj = gauss_jacobi_left(nodes, p, L, R);
      for (Eigen::Index i = 0; i < rj.size(); ++i) {
        const double ss = K.singular_smooth(rj.x(i), js);
        double v = ss;
        if (power == 2) v = has_reg ? 2.0 * ss * K.regular(rj.x(i), js) : 0.0;
        q.w.push_back(rj.x(i));
        q.wk.push_back(rj.w(i) * v);
      }
      if (power == 2) {
        const RuleD r2 = gauss_jacobi_left(nodes, 2.0 * p, L, R);
        for (Eigen::Index i = 0; i < r2.size(); ++i) {
          const double ss = K.singular_smooth(r2.x(i), js);
          q.w.push_back(r2.x(i));
          q.wk.push_back(r2.w(i) * ss * ss);
        }
      }
    }
  }
  return q;
}

}  // namespace cf
