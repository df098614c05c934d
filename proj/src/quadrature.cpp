#include "canonforge/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "canonforge/special.hpp"

namespace cf {
namespace {

RuleD golub_welsch(int n, double a, double b) {
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    // at k = 1 the factor (k + a + b) cancels against (s - 1)
    const double ratio = (k == 1) ? 4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0))
                                  : 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(ratio);
  }
  RuleD r;
  if (n == 1) {
    r.x = diag;
  }
  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(a + b + 2.0));
  if (n == 1) {
    r.w = Eigen::VectorXd::Constant(1, mu0);
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  r.x = es.eigenvalues();
  r.w = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return r;
}

}  // namespace

const RuleD& gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw ValidationError("gauss_jacobi: n must be positive");
  if (alpha <= -1.0 || beta <= -1.0) throw ValidationError("gauss_jacobi: exponents must exceed -1");
  static std::mutex mtx;
  static std::map<std::tuple<int, double, double>, std::unique_ptr<RuleD>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[{n, alpha, beta}];
  if (!slot) slot = std::make_unique<RuleD>(golub_welsch(n, alpha, beta));
  return *slot;
}

RuleD gauss_legendre(int n, double a, double b) {
  const RuleD& r = gauss_legendre(n);
  RuleD out;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  out.x = c + h * r.x.array();
  out.w = h * r.w;
  return out;
}

RuleD gauss_jacobi_left(int n, double p, double a, double b) {
  // (x - a)^p = ((b - a)/2)^p (1 + s)^p
  const RuleD& r = gauss_jacobi(n, 0.0, p);
  RuleD out;
  const double h = 0.5 * (b - a);
  out.x = a + h * (r.x.array() + 1.0);
  out.w = std::pow(h, p + 1.0) * r.w;
  return out;
}

}  // namespace cf
