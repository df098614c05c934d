#pragma once
#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <array>
#include <limits>
#include <vector>

#include "canonforge/kquad.hpp"

namespace cf {

// ---- Nystrom realization (Gauss-Legendre on [-t, t]) ----

struct DiscretizedOperator {
  double t = 0.0;
  Eigen::VectorXd nodes, weights;
  Eigen::MatrixXd matrix;  // W^{1/2} K(x_i + x_j) W^{1/2}
  Eigen::Index size() const { return matrix.rows(); }
};

DiscretizedOperator build_operator(const KernelFunction& K, double t, int N);

struct DetValue {
  double log_abs = 0.0;  // log |det|
  int sign = 1;
  double est_error = 0.0;
  double value() const { return sign * std::exp(log_abs); }
};

// det(I + sign M) by LU.
DetValue fredholm_det(const DiscretizedOperator& op, int sign);
// Nystrom det at N and 2N; throws when they disagree beyond tol.
DetValue fredholm_det_checked(const KernelFunction& K, double t, int N, int sign, double tol = 1e-4);

// Nystrom solution of (1 + eps K[t]) phi = K(. + t) at the nodes.
Eigen::VectorXd solve_phi_nystrom(const DiscretizedOperator& op, const KernelFunction& K, int eps);

// ---- piecewise Legendre-Galerkin realization ----

struct Panel {
  double a, b;
  int degree;
  int offset;
};

class GalerkinOperator {
 public:
  // extra_breaks: additional panel breaks inside (-t, t), graded like the singular lines
  GalerkinOperator(const KernelFunction& K, double t, int degree, const std::vector<double>& extra_breaks = {});

  double t() const { return t_; }
  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<Panel>& panels() const { return panels_; }
  const Eigen::MatrixXd& matrix() const { return A_; }
  const Eigen::VectorXd& rhs() const { return b_; }
  const Eigen::VectorXd& eigenvalues() const { return lam_; }
  double trace() const { return tr1_; }
  double trace_sq() const { return tr2_; }
  const KernelFunction& kernel() const { return *K_; }

  // log det(1 + eps K[t]) with exact first and second traces.
  DetValue log_det(int eps) const;
  // Taylor coefficients d_1..d_4 of det(1 - mu K[t]).
  std::array<double, 5> series_terms() const;
  // Coefficients of the Galerkin solution of (1 + eps K[t]) phi = K(. + t).
  const Eigen::VectorXd& coefficients(int eps) const;
  // phi^eps(t, x), iterated form K(x + t) - eps int K(x + y) phi(y) dy; zero for x < -t.
  double phi(double x, int eps) const;
  double phi_tt(int eps) const;
  // int_{-t}^{t} phi^eps(t, x) e^{izx} dx
  cplx transform(cplx z, int eps) const;
  // R(x, y; mu) = K(x + y) + mu k_x^T (1 - mu A)^{-1} k_y. When a singular line
  // log n - y is not a panel break, the column is solved on a refined copy (cached per y).
  double resolvent(double x, double y, double mu) const;
  // k_x(l) = int K(x + y) e_l(y) dy
  Eigen::VectorXd kernel_moments(double x) const;
  // basis values e_l(x)
  Eigen::VectorXd basis(double x) const;
  // sum_l c_l e_l(x); zero outside [-t, t]
  double expansion(const Eigen::VectorXd& c, double x) const;
  double max_abs_eigenvalue() const { return lam_.cwiseAbs().maxCoeff(); }

 private:
  const KernelFunction* K_;
  double t_;
  int degree_, dim_ = 0;
  std::vector<Panel> panels_;
  std::vector<double> breaks_;
  Eigen::MatrixXd A_, V_;
  Eigen::VectorXd b_, lam_;
  double tr1_ = 0.0, tr2_ = 0.0;
  Eigen::VectorXd c_plus_, c_minus_;
  mutable std::mutex refined_mtx_;
  mutable std::shared_ptr<const GalerkinOperator> refined_;
  mutable double refined_y_ = 0.0;
  bool is_break(double s) const;
  double resolvent_on_mesh(double x, double y, double mu) const;
  int nodes_for(int deg) const { return std::max(12, deg + 8); }
};

// Galerkin slices at the base and doubled resolutions.
struct Slice {
  double t;
  std::shared_ptr<const GalerkinOperator> base, fine;
  DetValue det_plus, det_minus;  // from the fine operator, est_error = |fine - base|
  double phi_tt_plus = 0.0, phi_tt_minus = 0.0, mu = 0.0, mu_err = 0.0;
  bool resolved = true;
};

class FredholmSolver {
 public:
  FredholmSolver(std::shared_ptr<const KernelFunction> K, int degree = 16, double resolve_tol = 1e-6);
  // Cached; t <= 0 gives the zero operator.
  std::shared_ptr<const Slice> slice(double t) const;
  // mu(t) from a single base-resolution operator, uncached.
  double mu_base(double t) const;
  const KernelFunction& kernel() const { return *K_; }
  std::shared_ptr<const KernelFunction> kernel_ptr() const { return K_; }
  int degree() const { return degree_; }
  double resolve_tol() const { return tol_; }

 private:
  std::shared_ptr<const KernelFunction> K_;
  int degree_;
  double tol_;
  mutable std::mutex mtx_;
  mutable std::map<double, std::shared_ptr<const Slice>> cache_;
};

struct HamiltonianProfile {
  std::vector<double> t, log_det_plus, log_det_minus, det_plus, det_minus, phi_tt_plus, phi_tt_minus, mu,
      m_detratio, m_expint, gamma, est_error;
  std::vector<double> q_plus_A, q_plus_B, q_plus_C, q_minus_A, q_minus_B, q_minus_C;
  std::vector<double> max_abs_eigenvalue;
  std::vector<bool> resolved;
  double tau_probe = std::numeric_limits<double>::quiet_NaN();
  double horizon = std::numeric_limits<double>::quiet_NaN();
  double max_two_path = 0.0, max_q_discrepancy = 0.0;
  bool flagged = false;
};

// Sweep t = 0, dt, ..., t_max. Beyond the resolvable horizon entries are NaN.
HamiltonianProfile mu_m_gamma(const FredholmSolver& F, double t_max, double dt);

// The same sweep on Gauss-Legendre Nystrom matrices of size N (error from 2N),
// with the trapezoid rule for the integral of mu.
HamiltonianProfile mu_m_gamma_nystrom(const KernelFunction& K, double t_max, double dt, int N,
                                      double resolve_tol = 1e-6);

// q(t) routes on an existing profile (filled in place); returns the max relative
// route discrepancy over stencils at least 5 dt away from every point of singular_t.
double schrodinger_q(HamiltonianProfile& H, const std::vector<double>& singular_t = {});

// exp(int_0^t mu) by composite Gauss per step, split at log n / 2.
double integrate_mu(const FredholmSolver& F, double t0, double t1);

}  // namespace cf
