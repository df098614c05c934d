#include "canonforge/fredholm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace cf {

// ---------------- Nystrom ----------------

DiscretizedOperator build_operator(const KernelFunction& K, double t, int N) {
  if (N < 16) throw ValidationError("build_operator: N >= 16 required");
  DiscretizedOperator op;
  op.t = t;
  if (t <= 0) {
    op.matrix = Eigen::MatrixXd::Zero(N, N);
    op.nodes = Eigen::VectorXd::Zero(N);
    op.weights = Eigen::VectorXd::Zero(N);
    return op;
  }
  if (2 * t > K.x_max() * (1 + 1e-12)) throw NumericError("fredholm", "kernel coverage insufficient for [0, 2t]");
  const RuleD r = gauss_legendre(N, -t, t);
  op.nodes = r.x;
  op.weights = r.w;
  const Eigen::VectorXd sw = r.w.cwiseSqrt();
  op.matrix.resize(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const double v = sw(i) * K(r.x(i) + r.x(j)) * sw(j);
      op.matrix(i, j) = v;
      op.matrix(j, i) = v;
    }
  return op;
}

DetValue fredholm_det(const DiscretizedOperator& op, int sign) {
  const Eigen::Index n = op.size();
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + double(sign) * op.matrix;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::MatrixXd& U = lu.matrixLU();
  DetValue d;
  d.sign = int(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < n; ++i) {
    d.log_abs += std::log(std::abs(U(i, i)));
    if (U(i, i) < 0) d.sign = -d.sign;
  }
  return d;
}

DetValue fredholm_det_checked(const KernelFunction& K, double t, int N, int sign, double tol) {
  DetValue a = fredholm_det(build_operator(K, t, N), sign);
  const DetValue b = fredholm_det(build_operator(K, t, 2 * N), sign);
  const double err = std::abs(a.value() - b.value());
  if (err > tol * std::max(1.0, std::abs(b.value())))
    throw NumericError("fredholm", "Nystrom determinants at N and 2N disagree by " + std::to_string(err), tol);
  DetValue r = b;
  r.est_error = err;
  return r;
}

Eigen::VectorXd solve_phi_nystrom(const DiscretizedOperator& op, const KernelFunction& K, int eps) {
  const Eigen::Index n = op.size();
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = K(op.nodes(i) + op.t);
  const Eigen::VectorXd sw = op.weights.cwiseSqrt();
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + double(eps) * op.matrix;
  const Eigen::VectorXd y = M.partialPivLu().solve(sw.cwiseProduct(rhs));
  return y.cwiseQuotient(sw);
}

// ---------------- Galerkin ----------------

namespace {

constexpr int kGradingLayers = 5;
constexpr double kGradingRatio = 0.2;

void panel_basis(const Panel& P, double x, double* out) {
  const double len = P.b - P.a;
  const double xi = std::clamp((2.0 * x - P.a - P.b) / len, -1.0, 1.0);
  legendre_orthonormal(xi, P.degree, out);
  const double s = std::sqrt(2.0 / len);
  for (int k = 0; k < P.degree; ++k) out[k] *= s;
}

}  // namespace

GalerkinOperator::GalerkinOperator(const KernelFunction& K, double t, int degree,
                                   const std::vector<double>& extra_breaks)
    : K_(&K), t_(t), degree_(degree) {
  if (degree < 2 || degree > 128) throw ValidationError("galerkin: degree must lie in [2, 128]");
  if (t <= 0) return;
  if (2 * t > K.x_max() * (1 + 1e-12)) throw NumericError("fredholm", "kernel coverage insufficient for [0, 2t]");
  // panels
  std::vector<double> pts = {-t, t};
  for (long n : K.singular_indices(0.0, 2 * t)) {
    if (K.log_n(n) >= 2 * t) continue;
    pts.push_back(K.log_n(n) - t);
    pts.push_back(t - K.log_n(n));
  }
  for (double b : extra_breaks)
    if (b > -t && b < t) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  for (double x : pts)
    if (breaks_.empty() || x - breaks_.back() > 1e-10 * (1.0 + t)) breaks_.push_back(x);
  breaks_.back() = t;
  // eigenfunctions carry |x - b|^p type terms at the breaks, grade towards both ends
  {
    std::vector<double> graded;
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
      const double a = breaks_[k], len = breaks_[k + 1] - a;
      graded.push_back(a);
      double h = 0.5 * len;
      graded.push_back(a + h);
      for (int l = 0; l < kGradingLayers; ++l) {
        h *= kGradingRatio;
        graded.push_back(a + h);
        graded.push_back(a + len - h);
      }
    }
    graded.push_back(t);
    std::sort(graded.begin(), graded.end());
    breaks_ = graded;
  }
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    const double len = breaks_[k + 1] - breaks_[k];
    const int d = std::max(6, int(std::ceil(degree * std::min(1.0, 4.0 * len / (2.0 * t)))));
    panels_.push_back({breaks_[k], breaks_[k + 1], d, dim_});
    dim_ += d;
  }
  A_ = Eigen::MatrixXd::Zero(dim_, dim_);
  b_ = Eigen::VectorXd::Zero(dim_);
  std::vector<double> bx(128), by(128);
  for (std::size_t ip = 0; ip < panels_.size(); ++ip) {
    const Panel& P = panels_[ip];
    for (std::size_t iq = ip; iq < panels_.size(); ++iq) {
      const Panel& Q = panels_[iq];
      const int m = (P.degree + Q.degree) / 2 + 1;
      const KQuad wq = kernel_quadrature(K, P.a + Q.a, P.b + Q.b, {P.a + Q.b, P.b + Q.a},
                                         nodes_for(std::max(P.degree, Q.degree)));
      const RuleD& gx = gauss_legendre(m);
      Eigen::MatrixXd U(P.degree, Eigen::Index(wq.size()) * m), W(Q.degree, Eigen::Index(wq.size()) * m);
      Eigen::Index col = 0;
      for (std::size_t i = 0; i < wq.size(); ++i) {
        const double w = wq.w[i];
        const double lo = std::max(P.a, w - Q.b), hi = std::min(P.b, w - Q.a);
        if (!(hi > lo)) {
          continue;
        }
        for (int j = 0; j < m; ++j) {
          const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx.x(j);
          const double wt = wq.wk[i] * 0.5 * (hi - lo) * gx.w(j);
          panel_basis(P, x, bx.data());
          panel_basis(Q, w - x, by.data());
          for (int k = 0; k < P.degree; ++k) U(k, col) = wt * bx[std::size_t(k)];
          for (int k = 0; k < Q.degree; ++k) W(k, col) = by[std::size_t(k)];
          ++col;
        }
      }
      const Eigen::MatrixXd blk = U.leftCols(col) * W.leftCols(col).transpose();
      A_.block(P.offset, Q.offset, P.degree, Q.degree) = blk;
      if (iq != ip) A_.block(Q.offset, P.offset, Q.degree, P.degree) = blk.transpose();
    }
    // right-hand side
    const KQuad bq = kernel_quadrature(K, P.a + t, P.b + t, {}, nodes_for(P.degree));
    for (std::size_t i = 0; i < bq.size(); ++i) {
      panel_basis(P, bq.w[i] - t, bx.data());
      for (int k = 0; k < P.degree; ++k) b_(P.offset + k) += bq.wk[i] * bx[std::size_t(k)];
    }
  }
  // diagonal blocks are symmetric up to rounding
  A_ = 0.5 * (A_ + A_.transpose()).eval();
  // exact traces
  const KQuad t1 = kernel_quadrature(K, 0.0, 2 * t, {}, nodes_for(degree));
  for (std::size_t i = 0; i < t1.size(); ++i) tr1_ += 0.5 * t1.wk[i];
  const KQuad t2 = kernel_quadrature(K, 0.0, 2 * t, {}, nodes_for(degree), 2);
  for (std::size_t i = 0; i < t2.size(); ++i) tr2_ += t2.wk[i] * (2 * t - t2.w[i]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_);
  lam_ = es.eigenvalues();
  V_ = es.eigenvectors();
  const Eigen::VectorXd vb = V_.transpose() * b_;
  c_plus_ = V_ * (vb.array() / (1.0 + lam_.array())).matrix();
  c_minus_ = V_ * (vb.array() / (1.0 - lam_.array())).matrix();
}

DetValue GalerkinOperator::log_det(int eps) const {
  DetValue d;
  if (dim_ == 0) return d;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < lam_.size(); ++k) {
    const double l = lam_(k), f = 1.0 + eps * l;
    if (f == 0.0) {
      d.log_abs = -std::numeric_limits<double>::infinity();
      return d;
    }
    if (f < 0) d.sign = -d.sign;
    acc += std::log(std::abs(f)) - eps * l + 0.5 * l * l;
  }
  d.log_abs = acc + eps * tr1_ - 0.5 * tr2_;
  return d;
}

std::array<double, 5> GalerkinOperator::series_terms() const {
  std::array<double, 5> d{1.0, 0.0, 0.0, 0.0, 0.0};
  if (dim_ == 0) return d;
  const double p1 = tr1_, p2 = tr2_, p3 = lam_.array().cube().sum(), p4 = lam_.array().square().square().sum();
  const double e1 = p1, e2 = (e1 * p1 - p2) / 2.0, e3 = (e2 * p1 - e1 * p2 + p3) / 3.0,
               e4 = (e3 * p1 - e2 * p2 + e1 * p3 - p4) / 4.0;
  d[1] = -e1;
  d[2] = e2;
  d[3] = -e3;
  d[4] = e4;
  return d;
}

const Eigen::VectorXd& GalerkinOperator::coefficients(int eps) const { return eps > 0 ? c_plus_ : c_minus_; }

Eigen::VectorXd GalerkinOperator::basis(double x) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (const Panel& P : panels_)
    if (x >= P.a && x <= P.b) {
      std::vector<double> bx(std::size_t(P.degree));
      panel_basis(P, x, bx.data());
      for (int k = 0; k < P.degree; ++k) v(P.offset + k) = bx[std::size_t(k)];
      break;
    }
  return v;
}

double GalerkinOperator::expansion(const Eigen::VectorXd& c, double x) const {
  for (const Panel& P : panels_)
    if (x >= P.a && x <= P.b) {
      double bx[128];
      panel_basis(P, x, bx);
      double acc = 0.0;
      for (int k = 0; k < P.degree; ++k) acc += c(P.offset + k) * bx[k];
      return acc;
    }
  return 0.0;
}

Eigen::VectorXd GalerkinOperator::kernel_moments(double x) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  std::vector<double> by(128);
  for (const Panel& Q : panels_) {
    const KQuad q = kernel_quadrature(*K_, x + Q.a, x + Q.b, {}, nodes_for(Q.degree));
    for (std::size_t i = 0; i < q.size(); ++i) {
      panel_basis(Q, q.w[i] - x, by.data());
      for (int k = 0; k < Q.degree; ++k) v(Q.offset + k) += q.wk[i] * by[std::size_t(k)];
    }
  }
  return v;
}

double GalerkinOperator::phi(double x, int eps) const {
  if (x < -t_) return 0.0;
  if (dim_ == 0) return (*K_)(x + t_);
  return (*K_)(x + t_) - eps * kernel_moments(x).dot(coefficients(eps));
}

double GalerkinOperator::phi_tt(int eps) const {
  if (dim_ == 0) return (*K_)(2 * t_);
  return (*K_)(2 * t_) - eps * b_.dot(coefficients(eps));
}

cplx GalerkinOperator::transform(cplx z, int eps) const {
  if (t_ <= 0) return 0.0;
  const cplx i(0, 1);
  const double az = std::abs(z);
  // int_0^{2t} K(w) e^{iz(w - t)} dw
  cplx T1 = 0.0;
  {
    const KQuad q = kernel_quadrature(*K_, 0.0, 2 * t_, {}, nodes_for(degree_) + int(std::ceil(az * t_)));
    for (std::size_t k = 0; k < q.size(); ++k) T1 += q.wk[k] * std::exp(i * z * (q.w[k] - t_));
  }
  const Eigen::VectorXd& c = coefficients(eps);
  cplx T2 = 0.0;
  std::vector<double> by(128);
  for (const Panel& Q : panels_) {
    const double len = Q.b - Q.a;
    const int m = Q.degree / 2 + 8 + int(std::ceil(az * std::min(2 * t_, len)));
    const RuleD& gx = gauss_legendre(m);
    const KQuad q = kernel_quadrature(*K_, -t_ + Q.a, t_ + Q.b, {-t_ + Q.b, t_ + Q.a},
                                      nodes_for(Q.degree) + int(std::ceil(0.5 * az * (len + 2 * t_))));
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double w = q.w[k];
      const double lo = std::max(-t_, w - Q.b), hi = std::min(t_, w - Q.a);
      if (!(hi > lo)) continue;
      cplx chord = 0.0;
      for (Eigen::Index j = 0; j < gx.size(); ++j) {
        const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx.x(j);
        panel_basis(Q, w - x, by.data());
        double ce = 0.0;
        for (int l = 0; l < Q.degree; ++l) ce += c(Q.offset + l) * by[std::size_t(l)];
        chord += 0.5 * (hi - lo) * gx.w(j) * std::exp(i * z * x) * ce;
      }
      T2 += q.wk[k] * chord;
    }
  }
  return T1 - double(eps) * T2;
}

bool GalerkinOperator::is_break(double s) const {
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), s - 1e-12 * (1.0 + t_));
  return it != breaks_.end() && std::abs(*it - s) <= 1e-12 * (1.0 + t_);
}

double GalerkinOperator::resolvent(double x, double y, double mu) const {
  if (dim_ == 0) return (*K_)(x + y);
  // R(., y) solves (1 - mu K) u = K(. + y): the data are singular at log n - y and
  // one application of K moves that to y - log n
  std::vector<double> extra;
  for (long n : K_->singular_indices(-1.0, std::abs(y) + t_ + 1e-12))
    for (double s : {K_->log_n(n) - y, y - K_->log_n(n)})
      if (s > -t_ && s < t_ && !is_break(s)) extra.push_back(s);
  if (extra.empty()) return resolvent_on_mesh(x, y, mu);
  std::shared_ptr<const GalerkinOperator> op;
  {
    std::lock_guard<std::mutex> lock(refined_mtx_);
    if (!refined_ || refined_y_ != y) {
      refined_ = std::make_shared<const GalerkinOperator>(*K_, t_, degree_, extra);
      refined_y_ = y;
    }
    op = refined_;
  }
  return op->resolvent_on_mesh(x, y, mu);
}

double GalerkinOperator::resolvent_on_mesh(double x, double y, double mu) const {
  const double kxy = (*K_)(x + y);
  const Eigen::VectorXd kx = kernel_moments(x), ky = kernel_moments(y);
  const Eigen::VectorXd a = V_.transpose() * kx, b = V_.transpose() * ky;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < lam_.size(); ++k) acc += a(k) * b(k) / (1.0 - mu * lam_(k));
  return kxy + mu * acc;
}

// ---------------- sweep ----------------

FredholmSolver::FredholmSolver(std::shared_ptr<const KernelFunction> K, int degree, double resolve_tol)
    : K_(std::move(K)), degree_(degree), tol_(resolve_tol) {
  if (degree < 2 || degree > 64) throw ValidationError("fredholm: degree must lie in [2, 64]");
  if (!(resolve_tol > 0)) throw ValidationError("fredholm: resolve_tol must be positive");
}

std::shared_ptr<const Slice> FredholmSolver::slice(double t) const {
  {
    std::lock_guard<std::mutex> lock(mtx_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  auto s = std::make_shared<Slice>();
  s->t = t;
  s->base = std::make_shared<GalerkinOperator>(*K_, t, degree_);
  s->fine = std::make_shared<GalerkinOperator>(*K_, t, 2 * degree_);
  const DetValue bp = s->base->log_det(1), bm = s->base->log_det(-1);
  s->det_plus = s->fine->log_det(1);
  s->det_minus = s->fine->log_det(-1);
  s->det_plus.est_error = std::abs(s->det_plus.log_abs - bp.log_abs);
  s->det_minus.est_error = std::abs(s->det_minus.log_abs - bm.log_abs);
  s->phi_tt_plus = s->fine->phi_tt(1);
  s->phi_tt_minus = s->fine->phi_tt(-1);
  s->mu = s->phi_tt_plus + s->phi_tt_minus;
  s->mu_err = std::abs(s->mu - (s->base->phi_tt(1) + s->base->phi_tt(-1)));
  s->resolved = std::isfinite(s->det_plus.log_abs) && std::isfinite(s->det_minus.log_abs) &&
                s->det_plus.sign > 0 && s->det_minus.sign > 0 &&
                std::max(s->det_plus.est_error, s->det_minus.est_error) <= tol_;
  std::lock_guard<std::mutex> lock(mtx_);
  return cache_.emplace(t, std::move(s)).first->second;
}

double FredholmSolver::mu_base(double t) const {
  const GalerkinOperator op(*K_, t, degree_);
  return op.phi_tt(1) + op.phi_tt(-1);
}

namespace {

// Weights on fixed Gauss nodes in [0, 1] integrating 1, x, .., x^{k-1} and x^p, .., x^{p+k-1} exactly.
const std::pair<Eigen::VectorXd, Eigen::VectorXd>& mixed_rule(double p) {
  static std::mutex mtx;
  static std::map<double, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  const int k = 5, n = 2 * k;
  const RuleD& g = gauss_legendre(n);
  Eigen::VectorXd x = 0.5 * (g.x.array() + 1.0);
  Eigen::MatrixXd M(n, n);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) {
      M(j, i) = std::pow(x(i), double(j));
      M(k + j, i) = std::pow(x(i), p + j);
    }
    rhs(j) = 1.0 / (j + 1.0);
    rhs(k + j) = 1.0 / (p + j + 1.0);
  }
  Eigen::VectorXd w = M.fullPivLu().solve(rhs);
  return cache.emplace(p, std::make_pair(x, w)).first->second;
}

}  // namespace

double integrate_mu(const FredholmSolver& F, double t0, double t1) {
  if (t1 <= 0) return 0.0;
  t0 = std::max(t0, 0.0);
  const KernelFunction& K = F.kernel();
  std::vector<double> pts = {t0, t1};
  std::vector<double> sing = {0.0};
  for (long n : K.singular_indices(0.0, 2 * t1)) sing.push_back(0.5 * K.log_n(n));
  for (double s : sing)
    if (s > t0 && s < t1) pts.push_back(s);
  std::sort(pts.begin(), pts.end());
  double acc = 0.0;
  const double p = K.exponent();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k], b = pts[k + 1];
    bool singular_start = false;
    for (double s : sing)
      if (std::abs(s - a) < 1e-12) singular_start = true;
    if (singular_start && p != std::round(p)) {
      const auto& [x, w] = mixed_rule(p);
      for (Eigen::Index i = 0; i < x.size(); ++i) acc += (b - a) * w(i) * F.mu_base(a + (b - a) * x(i));
    } else {
      const RuleD r = gauss_legendre(5, a, b);
      for (Eigen::Index i = 0; i < r.size(); ++i) acc += r.w(i) * F.mu_base(r.x(i));
    }
  }
  return acc;
}

HamiltonianProfile mu_m_gamma(const FredholmSolver& F, double t_max, double dt) {
  if (!(dt > 0) || t_max < 0) throw ValidationError("hamiltonian: need dt > 0 and t_max >= 0");
  HamiltonianProfile H;
  const long n = long(std::floor(t_max / dt + 1e-9)) + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool stopped = false;
  double lint = 0.0;
  for (long k = 0; k < n; ++k) {
    const double t = double(k) * dt;
    H.t.push_back(t);
    if (stopped) {
      for (auto* v : {&H.log_det_plus, &H.log_det_minus, &H.det_plus, &H.det_minus, &H.phi_tt_plus,
                      &H.phi_tt_minus, &H.mu, &H.m_detratio,
                      &H.m_expint, &H.gamma, &H.est_error, &H.max_abs_eigenvalue})
        v->push_back(nan);
      H.resolved.push_back(false);
      continue;
    }
    const auto s = F.slice(t);
    if (k > 0) lint += integrate_mu(F, double(k - 1) * dt, t);
    H.log_det_plus.push_back(s->det_plus.log_abs);
    H.log_det_minus.push_back(s->det_minus.log_abs);
    H.det_plus.push_back(s->det_plus.value());
    H.det_minus.push_back(s->det_minus.value());
    H.phi_tt_plus.push_back(s->phi_tt_plus);
    H.phi_tt_minus.push_back(s->phi_tt_minus);
    H.mu.push_back(s->mu);
    const double md = std::exp(s->det_plus.log_abs - s->det_minus.log_abs) * s->det_plus.sign * s->det_minus.sign;
    H.m_detratio.push_back(md);
    H.m_expint.push_back(std::exp(lint));
    H.gamma.push_back(md * md);
    H.est_error.push_back(std::max(s->det_plus.est_error, s->det_minus.est_error));
    H.max_abs_eigenvalue.push_back(s->fine->dim() ? s->fine->max_abs_eigenvalue() : 0.0);
    H.resolved.push_back(s->resolved);
    if (std::isnan(H.tau_probe) && std::min(std::abs(H.det_plus.back()), std::abs(H.det_minus.back())) < 1e-6)
      H.tau_probe = t;
    if (s->resolved) {
      H.max_two_path = std::max(H.max_two_path, std::abs(md - H.m_expint.back()) / std::abs(md));
    } else if (std::isnan(H.horizon)) {
      H.horizon = t;
    }
    // past this point the determinants are not representable
    if (!std::isfinite(s->det_plus.log_abs) || !std::isfinite(s->det_minus.log_abs) || s->det_plus.sign < 0 ||
        s->det_minus.sign < 0 || H.est_error.back() > 1.0)
      stopped = true;
  }
  std::vector<double> sing = {0.0};
  for (long j : F.kernel().singular_indices(0.0, 2 * t_max)) sing.push_back(0.5 * F.kernel().log_n(j));
  H.max_q_discrepancy = schrodinger_q(H, sing);
  if (H.max_two_path > 1e-3 || H.max_q_discrepancy > 1e-2) H.flagged = true;
  return H;
}

HamiltonianProfile mu_m_gamma_nystrom(const KernelFunction& K, double t_max, double dt, int N, double resolve_tol) {
  if (!(dt > 0) || t_max < 0) throw ValidationError("hamiltonian: need dt > 0 and t_max >= 0");
  HamiltonianProfile H;
  const long n = long(std::floor(t_max / dt + 1e-9)) + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool stopped = false;
  double lint = 0.0;
  auto phi_tt = [&](const DiscretizedOperator& op, int eps) {
    if (op.t <= 0) return K(2 * op.t);
    const Eigen::VectorXd phi = solve_phi_nystrom(op, K, eps);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < op.size(); ++j) acc += op.weights(j) * K(op.t + op.nodes(j)) * phi(j);
    return K(2 * op.t) - eps * acc;
  };
  for (long k = 0; k < n; ++k) {
    const double t = double(k) * dt;
    H.t.push_back(t);
    if (stopped) {
      for (auto* v : {&H.log_det_plus, &H.log_det_minus, &H.det_plus, &H.det_minus, &H.phi_tt_plus,
                      &H.phi_tt_minus, &H.mu, &H.m_detratio, &H.m_expint, &H.gamma, &H.est_error,
                      &H.max_abs_eigenvalue})
        v->push_back(nan);
      H.resolved.push_back(false);
      continue;
    }
    const DiscretizedOperator a = build_operator(K, t, N), b = build_operator(K, t, 2 * N);
    const DetValue ap = fredholm_det(a, 1), am = fredholm_det(a, -1);
    const DetValue dp = fredholm_det(b, 1), dm = fredholm_det(b, -1);
    const double pp = phi_tt(b, 1), pm = phi_tt(b, -1);
    const double mu = pp + pm;
    if (k > 0) lint += 0.5 * dt * (H.mu.back() + mu);
    H.log_det_plus.push_back(dp.log_abs);
    H.log_det_minus.push_back(dm.log_abs);
    H.det_plus.push_back(dp.value());
    H.det_minus.push_back(dm.value());
    H.phi_tt_plus.push_back(pp);
    H.phi_tt_minus.push_back(pm);
    H.mu.push_back(mu);
    const double md = std::exp(dp.log_abs - dm.log_abs) * dp.sign * dm.sign;
    H.m_detratio.push_back(md);
    H.m_expint.push_back(std::exp(lint));
    H.gamma.push_back(md * md);
    const double err = std::max(std::abs(dp.log_abs - ap.log_abs), std::abs(dm.log_abs - am.log_abs));
    H.est_error.push_back(err);
    H.max_abs_eigenvalue.push_back(t > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.matrix, Eigen::EigenvaluesOnly)
                                               .eigenvalues()
                                               .cwiseAbs()
                                               .maxCoeff()
                                         : 0.0);
    const bool ok = dp.sign > 0 && dm.sign > 0 && err <= resolve_tol;
    H.resolved.push_back(ok);
    if (std::isnan(H.tau_probe) && std::min(std::abs(dp.value()), std::abs(dm.value())) < 1e-6) H.tau_probe = t;
    if (ok)
      H.max_two_path = std::max(H.max_two_path, std::abs(md - H.m_expint.back()) / std::abs(md));
    else if (std::isnan(H.horizon))
      H.horizon = t;
    if (dp.sign < 0 || dm.sign < 0 || err > 1.0) stopped = true;
  }
  std::vector<double> sing = {0.0};
  for (long j : K.singular_indices(0.0, 2 * t_max)) sing.push_back(0.5 * K.log_n(j));
  H.max_q_discrepancy = schrodinger_q(H, sing);
  if (H.max_two_path > 1e-3 || H.max_q_discrepancy > 1e-2) H.flagged = true;
  return H;
}

// mu has a (t - s)^p cusp after each singular time; centered stencils are skipped nearby
constexpr double kQGuard = 5.0;

double schrodinger_q(HamiltonianProfile& H, const std::vector<double>& singular_t) {
  const std::size_t n = H.t.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto* v : {&H.q_plus_A, &H.q_plus_B, &H.q_plus_C, &H.q_minus_A, &H.q_minus_B, &H.q_minus_C}) v->assign(n, nan);
  if (n < 3) return 0.0;
  const double dt = H.t[1] - H.t[0];
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(H.resolved[k - 1] && H.resolved[k] && H.resolved[k + 1])) continue;
    const double mu_p = (H.mu[k + 1] - H.mu[k - 1]) / (2 * dt);
    const double mu2 = H.mu[k] * H.mu[k];
    H.q_plus_A[k] = mu2 - mu_p;
    H.q_minus_A[k] = mu2 + mu_p;
    H.q_plus_B[k] = -2.0 * (H.log_det_plus[k + 1] - 2 * H.log_det_plus[k] + H.log_det_plus[k - 1]) / (dt * dt);
    H.q_minus_B[k] = -2.0 * (H.log_det_minus[k + 1] - 2 * H.log_det_minus[k] + H.log_det_minus[k - 1]) / (dt * dt);
    H.q_plus_C[k] = -2.0 * (H.phi_tt_plus[k + 1] - H.phi_tt_plus[k - 1]) / (2 * dt);
    H.q_minus_C[k] = 2.0 * (H.phi_tt_minus[k + 1] - H.phi_tt_minus[k - 1]) / (2 * dt);
    bool straddles = false;
    for (double s : singular_t)
      if (std::abs(s - H.t[k]) <= kQGuard * dt) straddles = true;
    if (straddles) continue;
    // relative to the size of q, the stencil error scales with it
    for (const auto* q : {&H.q_plus_B, &H.q_plus_C})
      worst = std::max(worst, std::abs((*q)[k] - H.q_plus_A[k]) / std::max(1.0, std::abs(H.q_plus_A[k])));
    for (const auto* q : {&H.q_minus_B, &H.q_minus_C})
      worst = std::max(worst, std::abs((*q)[k] - H.q_minus_A[k]) / std::max(1.0, std::abs(H.q_minus_A[k])));
  }
  return worst;
}

}  // namespace cf
