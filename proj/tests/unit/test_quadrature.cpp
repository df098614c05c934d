#include "doctest.h"

#include <cmath>

#include "canonforge/quadrature.hpp"
#include "canonforge/special.hpp"

TEST_CASE("gauss legendre integrates polynomials exactly") {
  const auto& r = cf::gauss_legendre(10);
  for (int k = 0; k < 20; ++k) {
    double s = 0;
    for (int i = 0; i < r.size(); ++i) s += r.w(i) * std::pow(r.x(i), k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
  const auto ab = cf::gauss_legendre(8, 1.0, 3.0);
  CHECK(std::abs(ab.w.sum() - 2.0) < 1e-14);
  CHECK(std::abs(ab.w.dot(ab.x.array().exp().matrix()) - (std::exp(3.0) - std::exp(1.0))) < 1e-12);
}

TEST_CASE("gauss jacobi moments match beta functions") {
  const double a = 0.2, b = -0.4;
  const auto& r = cf::gauss_jacobi(12, a, b);
  // int (1-x)^a (1+x)^b x^2 against the beta closed form
  auto beta = [](double p, double q) {
    return std::exp(cf::log_gamma(p) + cf::log_gamma(q) - cf::log_gamma(p + q));
  };
  const double m0 = std::pow(2.0, a + b + 1) * beta(a + 1, b + 1);
  CHECK(std::abs(r.w.sum() - m0) < 1e-13);
  // x = 2u - 1 with u ~ Beta: E[u] = (b+1)/(a+b+2)
  const double m1 = m0 * (2.0 * (b + 1) / (a + b + 2) - 1.0);
  CHECK(std::abs(r.w.dot(r.x) - m1) < 1e-13);
}

TEST_CASE("left-singular rule on a shifted interval") {
  const double p = 0.2;
  const auto r = cf::gauss_jacobi_left(10, p, 1.0, 2.5);
  double s = 0;
  for (int i = 0; i < r.size(); ++i) s += r.w(i) * (r.x(i) - 1.0);
  CHECK(std::abs(s - std::pow(1.5, p + 2) / (p + 2)) < 1e-13);
}

TEST_CASE("orthonormal legendre values are orthonormal under gauss legendre") {
  const auto& r = cf::gauss_legendre(20);
  Eigen::MatrixXd V(r.size(), 12);
  for (int i = 0; i < r.size(); ++i) {
    double row[12];
    cf::legendre_orthonormal(r.x(i), 12, row);
    for (int k = 0; k < 12; ++k) V(i, k) = row[k];
  }
  const Eigen::MatrixXd G = V.transpose() * r.w.asDiagonal() * V;
  CHECK((G - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("uniform samples interpolate smooth data to high order") {
  std::vector<double> v;
  const double h = 0.01;
  for (int i = 0; i <= 200; ++i) v.push_back(std::sin(i * h));
  cf::UniformSamples<double> s(0.0, h, v);
  CHECK(std::abs(s(0.123456) - std::sin(0.123456)) < 1e-13);
  CHECK(std::abs(s(1.99) - std::sin(1.99)) < 1e-13);
  CHECK(s(0.5) == v[50]);
}
