#include "canonforge/selberg.hpp"

#include <algorithm>
#include <json.hpp>
#include <numeric>

namespace cf {

double SelbergDatum::degree() const {
  double s = 0.0;
  for (const auto& g : gamma) s += g.lambda;
  return 2.0 * s;
}

int kronecker_symbol(long D, long n) {
  if (n == 0) return (D == 1 || D == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (D < 0) result = -result;
  }
  while (n % 2 == 0) {
    n /= 2;
    const long r = ((D % 8) + 8) % 8;
    if (r == 0 || r == 2 || r == 4 || r == 6) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol (D / n), n odd positive
  long a = ((D % n) + n) % n, m = n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const long r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, m);
    if (a % 4 == 3 && m % 4 == 3) result = -result;
    a %= m;
  }
  return m == 1 ? result : 0;
}

double SelbergDatum::coeff(long n) const {
  if (n < 1) return 0.0;
  switch (kind) {
    case CoeffKind::zeta: return 1.0;
    case CoeffKind::dirichlet: return double(kronecker_symbol(discriminant, n));
    case CoeffKind::table:
      if (std::size_t(n) > table.size())
        throw ValidationError("selberg-data: coefficient table too short for n = " + std::to_string(n));
      return table[std::size_t(n - 1)];
  }
  return 0.0;
}

std::vector<double> SelbergDatum::coeff_table(long N) const {
  std::vector<double> a(std::size_t(N) + 1, 0.0);
  for (long n = 1; n <= N; ++n) a[std::size_t(n)] = coeff(n);
  return a;
}

void SelbergDatum::validate() const {
  if (!(Q > 0)) throw ValidationError("selberg-data: Q must be positive");
  if (gamma.empty()) throw ValidationError("selberg-data: at least one gamma factor required");
  for (const auto& g : gamma) {
    if (!(g.lambda > 0)) throw ValidationError("selberg-data: lambda_j must be positive");
    if (g.mu.real() < 0) throw ValidationError("selberg-data: Re(mu_j) must be non-negative");
  }
  if (epsilon != 1 && epsilon != -1) throw ValidationError("selberg-data: epsilon must be +1 or -1");
  if (m_L < 0) throw ValidationError("selberg-data: m_L must be non-negative");
  if (coeff(1) != 1.0) throw ValidationError("selberg-data: a(1) must equal 1");
  if (kind == CoeffKind::dirichlet && kronecker_symbol(discriminant, -1) != (discriminant > 0 ? 1 : -1))
    throw ValidationError("selberg-data: discriminant inconsistent with its sign");
}

SelbergDatum zeta_datum() {
  SelbergDatum d;
  d.label = "zeta";
  d.Q = 1.0 / std::sqrt(kPi);
  d.gamma = {{0.5, 0.0}};
  d.epsilon = 1;
  d.m_L = 1;
  d.kind = CoeffKind::zeta;
  return d;
}

namespace {

bool squarefree(long m) {
  m = std::labs(m);
  for (long p = 2; p * p <= m; ++p)
    if (m % (p * p) == 0) return false;
  return true;
}

bool is_fundamental_discriminant(long D) {
  const long r = ((D % 4) + 4) % 4;
  if (r == 1) return squarefree(D);
  if (r != 0) return false;
  const long m = D / 4, rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && squarefree(m);
}

}  // namespace

SelbergDatum dirichlet_datum(long D) {
  const long q = std::labs(D);
  if (q < 3) throw ValidationError("selberg-data: |D| >= 3 required for a primitive real character");
  if (!is_fundamental_discriminant(D))
    throw ValidationError("selberg-data: " + std::to_string(D) + " is not a fundamental discriminant");
  SelbergDatum d;
  d.label = "chi:" + std::to_string(D);
  d.Q = std::sqrt(double(q) / kPi);
  d.gamma = {{0.5, D > 0 ? 0.0 : 0.5}};
  d.epsilon = 1;
  d.m_L = 0;
  d.kind = CoeffKind::dirichlet;
  d.discriminant = D;
  return d;
}

SelbergDatum datum_by_name(const std::string& name) {
  if (name == "zeta") return zeta_datum();
  if (name.rfind("chi:", 0) == 0) return dirichlet_datum(std::stol(name.substr(4)));
  throw ValidationError("selberg-data: unknown datum '" + name + "' (use zeta, chi:D or --datum file)");
}

SelbergDatum datum_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SelbergDatum d;
  d.label = j.value("label", std::string("custom"));
  d.Q = j.at("Q").get<double>();
  for (const auto& g : j.at("gamma")) {
    const double im = g.size() > 2 ? g[2].get<double>() : 0.0;
    d.gamma.push_back({g.at(0).get<double>(), cplx(g.at(1).get<double>(), im)});
  }
  d.epsilon = j.value("epsilon", 1);
  d.m_L = j.value("m_L", 0);
  const auto& c = j.at("coeffs");
  const std::string kind = c.at("kind").get<std::string>();
  if (kind == "zeta") {
    d.kind = CoeffKind::zeta;
  } else if (kind == "dirichlet") {
    d.kind = CoeffKind::dirichlet;
    if (c.contains("discriminant")) {
      d.discriminant = c.at("discriminant").get<long>();
    } else {
      const long q = c.at("modulus").get<long>();
      if (q % 4 == 1) d.discriminant = q;
      else if (q % 4 == 3) d.discriminant = -q;
      else if (q == 4) d.discriminant = -4;
      else throw ValidationError("selberg-data: modulus " + std::to_string(q) + " needs an explicit discriminant");
    }
  } else if (kind == "table") {
    d.kind = CoeffKind::table;
    d.table = c.at("table").get<std::vector<double>>();
  } else {
    throw ValidationError("selberg-data: unknown coefficient kind '" + kind + "'");
  }
  d.validate();
  return d;
}

std::string datum_to_json_text(const SelbergDatum& d) {
  nlohmann::json j;
  j["label"] = d.label;
  j["Q"] = d.Q;
  j["gamma"] = nlohmann::json::array();
  for (const auto& g : d.gamma) j["gamma"].push_back({g.lambda, g.mu.real(), g.mu.imag()});
  j["epsilon"] = d.epsilon;
  j["m_L"] = d.m_L;
  nlohmann::json c;
  switch (d.kind) {
    case CoeffKind::zeta: c["kind"] = "zeta"; break;
    case CoeffKind::dirichlet:
      c["kind"] = "dirichlet";
      c["discriminant"] = d.discriminant;
      break;
    case CoeffKind::table:
      c["kind"] = "table";
      c["table"] = d.table;
      break;
  }
  j["coeffs"] = c;
  return j.dump();
}

std::vector<double> q_coeffs(const SelbergDatum& L, double omega, int nu, long N) {
  if (N < 1) throw ValidationError("q_coeffs: N >= 1 required");
  if (nu < 1) throw ValidationError("q_coeffs: nu >= 1 required");
  const auto a = L.coeff_table(N);
  const auto ap = dirichlet_power(a, nu);
  const auto am = dirichlet_power(a, -nu);
  std::vector<double> q(std::size_t(N) + 1, 0.0);
  for (long d = 1; d <= N; ++d) {
    const double w = am[std::size_t(d)] * std::pow(double(d), -2.0 * omega);
    if (w == 0.0) continue;
    for (long k = 1; d * k <= N; ++k) q[std::size_t(d * k)] += ap[std::size_t(k)] * w;
  }
  for (long n = 1; n <= N; ++n) q[std::size_t(n)] *= std::pow(double(n), omega);
  return q;
}

namespace {

// (x^{1-s} - 1) / (s - 1), stable near s = 1.
cplx pole_difference(cplx s, double logx) {
  const cplx e = (1.0 - s) * logx;
  if (std::abs(e) < 1e-4) {
    // expm1(e)/(s-1) = -logx * (1 + e/2 + e^2/6 + e^3/24)
    return -logx * (1.0 + e / 2.0 + e * e / 6.0 + e * e * e / 24.0);
  }
  return (std::exp(e) - 1.0) / (s - 1.0);
}

struct HurwitzTerm {
  double coef;
  double a;
};

// sum_a coef_a zeta(s, a), optionally multiplied by (s - 1).
cplx hurwitz_combination(cplx s, const std::vector<HurwitzTerm>& terms, bool times_pole, double tol) {
  const int K = 10;
  const long N = std::max(20L, long(std::ceil(0.7 * (std::abs(s) + 2.0 * K))));
  double coef_sum = 0.0;
  for (const auto& t : terms) coef_sum += t.coef;
  cplx head = 0.0, pole = 0.0, tail = 0.0;
  double last = 0.0, scale = 0.0;
  for (const auto& t : terms) {
    cplx part = 0.0;
    for (long n = 0; n < N; ++n) part += std::exp(-s * std::log(double(n) + t.a));
    const double x = double(N) + t.a, lx = std::log(x);
    const cplx xs = std::exp(-s * lx);
    part += 0.5 * xs;
    // Bernoulli corrections
    cplx rising = s;  // s (s+1) ... (s + 2k - 2)
    cplx xp = xs / x;  // x^{-s-1}
    cplx corr = 0.0;
    for (int k = 1; k <= K; ++k) {
      double fact = 1.0;
      for (int j = 2; j <= 2 * k; ++j) fact *= j;
      const cplx term = bernoulli_2k(k) / fact * rising * xp;
      corr += term;
      if (k == K) last += std::abs(term * t.coef);
      rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
      xp /= x * x;
    }
    part += corr;
    head += t.coef * part;
    scale += std::abs(t.coef * part);
    if (times_pole) pole += t.coef * std::exp((1.0 - s) * lx);
    else if (coef_sum == 0.0) pole += t.coef * pole_difference(s, lx);
    else pole += t.coef * std::exp((1.0 - s) * lx) / (s - 1.0);
  }
  if (times_pole) tail = (s - 1.0) * head + pole;
  else tail = head + pole;
  if (last > tol * std::max(scale, std::abs(tail)))
    throw NumericError("selberg-data", "Euler-Maclaurin did not reach requested tolerance", tol);
  return tail;
}

bool near_gamma_pole(cplx w) {
  if (w.real() > 0.5) return false;
  const double k = std::round(-w.real());
  return std::abs(w + k) < 1e-3;
}

}  // namespace

cplx l_value(const SelbergDatum& L, cplx s, bool with_pole_factor, double tol) {
  switch (L.kind) {
    case CoeffKind::zeta: {
      const std::vector<HurwitzTerm> t = {{1.0, 1.0}};
      if (L.m_L > 0 && with_pole_factor) {
        cplx v = hurwitz_combination(s, t, true, tol);
        for (int k = 1; k < L.m_L; ++k) v *= (s - 1.0);
        return v;
      }
      if (s == cplx(1.0, 0.0)) throw ValidationError("selberg-data: pole of zeta at s = 1");
      return hurwitz_combination(s, t, false, tol);
    }
    case CoeffKind::dirichlet: {
      const long q = std::labs(L.discriminant);
      std::vector<HurwitzTerm> t;
      for (long a = 1; a < q; ++a) {
        const int c = kronecker_symbol(L.discriminant, a);
        if (c != 0) t.push_back({double(c), double(a) / double(q)});
      }
      cplx v = std::exp(-s * std::log(double(q))) * hurwitz_combination(s, t, false, tol);
      if (with_pole_factor)
        for (int k = 0; k < L.m_L; ++k) v *= (s - 1.0);
      return v;
    }
    case CoeffKind::table: {
      if (s.real() < 1.5)
        throw NumericError("selberg-data", "table data only evaluable by Dirichlet series for Re(s) >= 1.5", tol);
      cplx v = 0.0;
      for (std::size_t n = 1; n <= L.table.size(); ++n) v += L.table[n - 1] * std::exp(-s * std::log(double(n)));
      const double bound = std::pow(double(L.table.size()), 1.0 - s.real()) / (s.real() - 1.0);
      if (bound > tol * std::abs(v)) throw NumericError("selberg-data", "coefficient table too short for Dirichlet series", tol);
      if (with_pole_factor)
        for (int k = 0; k < L.m_L; ++k) v *= (s - 1.0);
      return v;
    }
  }
  return 0.0;
}

namespace {

// log of the archimedean factor with the s^m factor absorbed into Gamma(lambda s)
// whenever mu = 0, plus the finite part L(s)(s-1)^m.
bool direct_evaluable(const SelbergDatum& L, cplx s) {
  // Euler-Maclaurin cancels catastrophically far left of the strip; real data are self-dual
  if (s.real() < -0.5) return false;
  int absorb = L.m_L;
  for (const auto& g : L.gamma) {
    cplx w = g.lambda * s + g.mu;
    if (absorb > 0 && g.mu == cplx(0.0)) {
      w += 1.0;
      --absorb;
    }
    if (near_gamma_pole(w)) return false;
  }
  if (absorb > 0 && std::abs(s) < 1e-300) return false;
  return true;
}

cplx log_xi_direct(const SelbergDatum& L, cplx s, double tol, cplx* finite) {
  int absorb = L.m_L;
  cplx lf = s * std::log(L.Q);
  for (const auto& g : L.gamma) {
    cplx w = g.lambda * s + g.mu;
    if (absorb > 0 && g.mu == cplx(0.0)) {
      lf += log_gamma(w + 1.0) - std::log(g.lambda);
      --absorb;
    } else {
      lf += log_gamma(w);
    }
  }
  for (int k = 0; k < absorb; ++k) lf += std::log(s);
  *finite = l_value(L, s, true, tol);
  return lf;
}

}  // namespace

CompletedValue xi_eval(const SelbergDatum& L, cplx s, double tol) {
  if (!direct_evaluable(L, s)) {
    CompletedValue r = xi_eval(L, 1.0 - s, tol);
    r.s = s;
    r.xi *= double(L.epsilon);
    return r;
  }
  cplx fin;
  const cplx lf = log_xi_direct(L, s, tol, &fin);
  return {s, std::polar(1.0, lf.imag()) * fin, lf.real()};
}

cplx log_xi(const SelbergDatum& L, cplx s, double tol) {
  const CompletedValue v = xi_eval(L, s, tol);
  return std::log(v.xi) + v.log_scale;
}

}  // namespace cf
