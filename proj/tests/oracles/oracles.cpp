#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol, int max_level) {
  if (!(b > a)) return 0.0;
  const double half = 0.5 * (b - a), hp = 0.5 * M_PI;
  const double tau_max = 3.2;
  auto node_sum = [&](double h, bool odd_only) {
    double acc = 0.0;
    const long n = long(std::ceil(tau_max / h));
    for (long k = -n; k <= n; ++k) {
      if (odd_only && (k % 2 == 0)) continue;
      const double tau = double(k) * h;
      const double u = hp * std::sinh(tau);
      const double ch = std::cosh(u);
      const double w = hp * std::cosh(tau) / (ch * ch);
      // distances to the nearer endpoint without cancellation
      const double dl = (b - a) / (1.0 + std::exp(-2.0 * u)), dr = (b - a) / (1.0 + std::exp(2.0 * u));
      const double x = u < 0 ? a + dl : b - dr;
      if (!(x > a && x < b)) continue;
      acc += w * f(x);
    }
    return acc;
  };
  double h = 0.5;
  double s = node_sum(h, false);
  double I = half * h * s;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    s += node_sum(h, true);
    const double In = half * h * s;
    if (std::abs(In - I) <= tol * std::max(1.0, std::abs(In))) return In;
    I = In;
  }
  return I;
}

double tanh_sinh_split(const std::function<double(double)>& f, double a, double b, std::vector<double> splits,
                       double tol, int max_level) {
  std::vector<double> pts = {a, b};
  for (double s : splits)
    if (s > a + 1e-13 && s < b - 1e-13) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1] - pts[k] > 1e-13) acc += tanh_sinh(f, pts[k], pts[k + 1], tol, max_level);
  return acc;
}

std::array<double, 5> power_traces(const cf::KernelFunction& K, double t, double tol) {
  std::array<double, 5> p{};
  if (t <= 0) return p;
  std::vector<double> sigma = {0.0};
  for (long n : K.singular_indices(0.0, 2 * t)) sigma.push_back(K.log_n(n));
  auto shifted = [&](double c, double sgn) {  // points sigma*sgn + c
    std::vector<double> v;
    for (double s : sigma) v.push_back(sgn * s + c);
    return v;
  };
  // x splits where singular lines leave through an edge of the square
  std::vector<double> xs;
  for (double s : sigma) {
    xs.push_back(s - t);
    xs.push_back(s + t);
  }
  const double inner_tol = tol * 0.1;
  auto K2 = [&](double x, double y) {
    std::vector<double> sp = shifted(-x, 1.0);
    const auto more = shifted(-y, 1.0);
    sp.insert(sp.end(), more.begin(), more.end());
    return tanh_sinh_split([&](double s) { return K(x + s) * K(s + y); }, -t, t, sp, inner_tol, 7);
  };
  auto ysplits = [&](double x) {
    std::vector<double> sp = shifted(-x, 1.0);
    for (double s : sigma) {
      sp.push_back(s - t);
      sp.push_back(s + t);
      for (double s2 : sigma) sp.push_back(x + s2 - s);
    }
    return sp;
  };
  p[1] = tanh_sinh_split([&](double x) { return K(2 * x); }, -t, t, shifted(0.0, 0.5), tol);
  p[2] = tanh_sinh_split(
      [&](double x) {
        return tanh_sinh_split([&](double y) { double k = K(x + y); return k * k; }, -t, t, shifted(-x, 1.0), inner_tol);
      },
      -t, t, xs, tol);
  p[3] = tanh_sinh_split(
      [&](double x) {
        return tanh_sinh_split([&](double y) { return K2(x, y) * K(x + y); }, -t, t, ysplits(x), inner_tol, 6);
      },
      -t, t, xs, tol, 6);
  p[4] = tanh_sinh_split(
      [&](double x) {
        return tanh_sinh_split([&](double y) { double k = K2(x, y); return k * k; }, -t, t, ysplits(x), inner_tol, 6);
      },
      -t, t, xs, tol, 6);
  return p;
}

std::array<double, 5> series_from_traces(const std::array<double, 5>& p) {
  std::array<double, 5> e{1.0, 0, 0, 0, 0};
  for (int n = 1; n <= 4; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += ((k % 2) ? 1.0 : -1.0) * e[std::size_t(n - k)] * p[std::size_t(k)];
    e[std::size_t(n)] = acc / n;
  }
  std::array<double, 5> d{};
  for (int n = 0; n <= 4; ++n) d[std::size_t(n)] = ((n % 2) ? -1.0 : 1.0) * e[std::size_t(n)];
  return d;
}

std::vector<double> naive_dirichlet_inverse(const std::vector<double>& a) {
  std::vector<double> b(a.size(), 0.0);
  if (a.size() < 2) return b;
  b[1] = 1.0 / a[1];
  for (std::size_t n = 2; n < a.size(); ++n) {
    double acc = 0.0;
    for (std::size_t d = 1; d < n; ++d)
      if (n % d == 0) acc += a[n / d] * b[d];
    b[n] = -acc / a[1];
  }
  return b;
}

}  // namespace oracle
