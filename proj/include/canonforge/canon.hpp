#pragma once
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "canonforge/fredholm.hpp"

namespace cf {

struct EvolvedPair {
  double t = 0.0;
  cplx z, A, B;
  double J_diag = std::numeric_limits<double>::quiet_NaN();
  bool resolved = true;
};

struct FieldValue {
  double F = 0.0, G = 0.0;
  double est_error = 0.0;
};

// (L, omega, nu) together with its kernel, Fredholm solver and density rho.
// Immutable after construction apart from append-only caches.
class StructureFamily {
 public:
  StructureFamily(const SelbergDatum& L, double omega, int nu, double t_max, int degree = 16,
                  double resolve_tol = 1e-6);

  const Structure& structure() const { return S_; }
  const KernelFunction& kernel() const { return *K_; }
  const FredholmSolver& solver() const { return F_; }
  const RhoDensity& rho() const;
  double t_max() const { return t_max_; }

  cplx E(cplx z) const { return S_.E(z); }
  cplx E_sharp(cplx z) const { return S_.E(-z); }
  cplx A(cplx z) const { return S_.A(z); }
  cplx B(cplx z) const { return S_.B(z); }
  cplx theta(cplx z) const { return theta_eval(S_, z); }

  // m(t) = det(1 + K[t]) / det(1 - K[t]); 1 for t <= 0.
  double m(double t) const;
  double gamma(double t) const { return m(t) * m(t); }

 private:
  Structure S_;
  double t_max_;
  std::shared_ptr<const KernelFunction> K_;
  FredholmSolver F_;
  mutable std::once_flag rho_once_;
  mutable std::unique_ptr<RhoDensity> rho_;
};

// A(t, z), B(t, z). For t > 0 the symmetrized finite-range formula, entire in z;
// for t <= 0 the closed trigonometric continuation of (A(z), B(z)).
EvolvedPair ab_eval(const StructureFamily& fam, double t, cplx z);

// Half-line Fourier route: needs Im z > 1/2 + omega. The integral of K over
// [0, infinity) is summed term-wise up to x = X.
EvolvedPair ab_direct(const StructureFamily& fam, double t, cplx z, double X = 12.0);

// |d/dt (A,B) + z J H (A,B)| / |z J H (A,B)| by centered differences.
double ode_residual(const StructureFamily& fam, double t, cplx z, double dt);

struct PropagateOptions {
  double h = 0.01;
  double step_tol = 1e-9;
  double h_min = 1e-4;
};
// Classical RK4 with step doubling; closed form whenever both ends are <= 0.
EvolvedPair propagate(const StructureFamily& fam, cplx z, double t_from, double t_to, PropagateOptions opt = {});

// J(t; z, w); the diagonal uses the |E|^2 difference quotient and w = conj(z)
// the derivative limit.
cplx j_eval(const StructureFamily& fam, double t, cplx z, cplx w);
// (1/pi) int_t^s [conj A(z) A(w) / gamma + conj B(z) B(w) gamma] by composite Gauss.
cplx j_increment(const StructureFamily& fam, double t, double s, cplx z, cplx w, int panels = 4);

FieldValue fields_fg(const StructureFamily& fam, double t, double x);

struct PdeResidual {
  double r1 = 0.0, r2 = 0.0;          // normalized by the local magnitude of the terms (floor 1e-9)
  double abs1 = 0.0, abs2 = 0.0;      // unnormalized
};
PdeResidual pde_residual(const StructureFamily& fam, double t, double x, double dt, double dx);

}  // namespace cf
