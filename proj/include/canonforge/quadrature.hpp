#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace cf {

// Nodes and weights on a reference interval.
template <typename Scalar>
struct Rule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w;
  Eigen::Index size() const { return x.size(); }
};
using RuleD = Rule<double>;

// Gauss-Jacobi rule for weight (1-x)^alpha (1+x)^beta on [-1, 1] (Golub-Welsch).
// Rules are cached; the returned reference stays valid for the program lifetime.
const RuleD& gauss_jacobi(int n, double alpha, double beta);
inline const RuleD& gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Gauss-Legendre on [a, b].
RuleD gauss_legendre(int n, double a, double b);

// Gauss rule on [a, b] for weight (x - a)^p.
RuleD gauss_jacobi_left(int n, double p, double a, double b);

// Orthonormal Legendre values sqrt((2k+1)/2) P_k(x), k < n, for x in [-1, 1].
template <typename Scalar>
void legendre_orthonormal(Scalar x, int n, Scalar* out) {
  if (n <= 0) return;
  Scalar p0 = Scalar(1), p1 = x;
  out[0] = std::sqrt(Scalar(0.5));
  if (n > 1) out[1] = p1 * std::sqrt(Scalar(1.5));
  for (int k = 2; k < n; ++k) {
    const Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
    out[k] = p2 * std::sqrt(Scalar(2 * k + 1) / Scalar(2));
    p0 = p1;
    p1 = p2;
  }
}

// Uniform-grid sampled function with local Lagrange interpolation.
template <typename Value>
class UniformSamples {
 public:
  UniformSamples() = default;
  UniformSamples(double x0, double h, std::vector<Value> v, int stencil = 8)
      : x0_(x0), h_(h), v_(std::move(v)), stencil_(stencil) {}

  double x0() const { return x0_; }
  double step() const { return h_; }
  double x_end() const { return x0_ + h_ * double(v_.size() - 1); }
  std::size_t size() const { return v_.size(); }
  const std::vector<Value>& values() const { return v_; }
  std::vector<Value>& values() { return v_; }

  Value operator()(double x) const {
    const double s = (x - x0_) / h_;
    const long n = long(v_.size());
    long i0 = long(std::floor(s)) - stencil_ / 2 + 1;
    if (i0 < 0) i0 = 0;
    if (i0 + stencil_ > n) i0 = n - stencil_;
    const double r = s - double(i0);
    // exact hit
    const double rr = std::round(s);
    if (std::abs(s - rr) < 1e-13 && rr >= 0 && rr < double(n)) return v_[std::size_t(rr)];
    Value acc = Value(0);
    for (int j = 0; j < stencil_; ++j) {
      double l = 1.0;
      for (int k = 0; k < stencil_; ++k)
        if (k != j) l *= (r - k) / double(j - k);
      acc += v_[std::size_t(i0 + j)] * l;
    }
    return acc;
  }

 private:
  double x0_ = 0.0, h_ = 1.0;
  std::vector<Value> v_;
  int stencil_ = 8;
};

}  // namespace cf
