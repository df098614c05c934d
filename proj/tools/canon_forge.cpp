#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "canonforge/canon.hpp"
#include "canonforge/hbprobe.hpp"
#include "canonforge/io.hpp"
#include "json.hpp"

namespace {

using namespace cf;
using nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUsage = 64;

struct Common {
  std::string l = "zeta";
  std::string datum;  // path or inline JSON, overrides --l
  double omega = 1.2;
  int nu = 1;
  std::string out;
  std::string manifest;
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

SelbergDatum resolve_datum(const Common& c) {
  if (c.datum.empty()) return datum_by_name(c.l);
  const std::string text = c.datum.front() == '{' ? c.datum : read_text(c.datum);
  return datum_from_json_text(text);
}

void check_params(const Common& c) {
  if (!(c.omega > 0)) throw ValidationError("--omega must be positive");
  if (c.nu < 1) throw ValidationError("--nu must be a positive integer");
}

void require_positive(double v, const char* name) {
  if (!(v > 0)) throw ValidationError(std::string(name) + " must be positive");
}

std::string manifest_path(const Common& c) {
  if (!c.manifest.empty()) return c.manifest;
  const std::filesystem::path out(c.out);
  return (out.parent_path() / "manifest.json").string();
}

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

int threads_from_env() {
  const char* env = std::getenv("CANON_FORGE_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ValidationError("CANON_FORGE_THREADS must be a positive integer");
  return int(v);
}

// Turns a JSON object into trailing flags so that --config overrides the command line.
std::vector<std::string> config_tokens(const std::string& path) {
  const ordered_json j = ordered_json::parse(read_text(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError("--config: " + path + " is not a JSON object");
  std::vector<std::string> tok;
  auto scalar = [](const ordered_json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
      std::ostringstream ss;
      ss.precision(17);
      ss << v.get<double>();
      return ss.str();
    }
    if (v.is_object()) return v.dump();
    throw ValidationError("--config: unsupported value " + v.dump());
  };
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) tok.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        tok.push_back(flag);
        tok.push_back(scalar(v));
      }
    } else {
      tok.push_back(flag);
      tok.push_back(scalar(value));
    }
  }
  return tok;
}

struct Run {
  RunManifest manifest;
  Common common;
  ordered_json config = ordered_json::object();

  void finish(const std::vector<std::string>& outputs) {
    manifest.outputs = outputs;
    manifest.config_json = config.dump();
    const std::string path = manifest_path(common);
    write_text(path, manifest.to_json());
  }
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
  c.out = default_out;
  sub->add_option("--l", c.l, "built-in datum: zeta or chi:D");
  sub->add_option("--datum", c.datum, "datum JSON file or inline JSON object");
  sub->add_option("--omega", c.omega, "shift omega > 0");
  sub->add_option("--nu", c.nu, "power nu >= 1");
  sub->add_option("--out", c.out, "output file");
  sub->add_option("--manifest", c.manifest, "manifest path (default: manifest.json next to --out)");
}

void echo_common(Run& r, const SelbergDatum& L) {
  r.config["l"] = r.common.l;
  r.config["datum"] = ordered_json::parse(datum_to_json_text(L));
  r.config["omega"] = r.common.omega;
  r.config["nu"] = r.common.nu;
  r.config["out"] = r.common.out;
}

// ---------------- kernel ----------------

struct KernelArgs {
  double xmin = 0.0, xmax = 3.0, step = 0.005;
  std::string route = "both";
  double contour_c = -1.0, contour_U = 2000.0, contour_du = 0.25;
};

int run_kernel(Run& r, const KernelArgs& a) {
  check_params(r.common);
  const SelbergDatum L = resolve_datum(r.common);
  require_continuous(L, r.common.omega, r.common.nu);
  require_positive(a.step, "--step");
  if (!(a.xmax > a.xmin)) throw ValidationError("--xmax must exceed --xmin");
  if (a.route != "explicit" && a.route != "contour" && a.route != "both")
    throw ValidationError("--route must be explicit, contour or both");
  echo_common(r, L);
  r.config.update({{"xmin", a.xmin}, {"xmax", a.xmax}, {"step", a.step}, {"route", a.route},
                   {"contour_c", a.contour_c}, {"contour_U", a.contour_U}, {"contour_du", a.contour_du}});
  const auto grid = uniform_grid(a.xmin, a.xmax, a.step);
  std::vector<KernelProfile> profiles;
  if (a.route != "contour") {
    Timer t;
    profiles.push_back(kernel_explicit(L, r.common.omega, r.common.nu, grid));
    r.manifest.timings.push_back({"kernel_explicit", t.seconds()});
  }
  // the contour cross-check is only run by default where its tail is controllable
  const double P = r.common.nu * r.common.omega * L.degree();
  const bool skip_contour = a.route == "both" && P < 2.0;
  if (skip_contour)
    r.manifest.extra.push_back({"contour_skipped", "\"nu*omega*d_L < 2; use --route contour to force\""});
  if (a.route != "explicit" && !skip_contour) {
    Timer t;
    ContourOptions opt;
    opt.c = a.contour_c;
    opt.U = a.contour_U;
    opt.du = a.contour_du;
    profiles.push_back(kernel_contour(L, r.common.omega, r.common.nu, grid, opt));
    r.manifest.timings.push_back({"kernel_contour", t.seconds()});
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : profiles) {
    double worst = 0.0;
    for (std::size_t k = 0; k < p.x.size(); ++k) {
      rows.push_back({format_number(p.x[k]), format_number(p.values[k]), p.route, format_number(p.est_error[k])});
      worst = std::max(worst, p.est_error[k]);
    }
    r.manifest.errors.push_back({"kernel_" + p.route, worst});
  }
  write_csv(r.common.out, {"x", "K", "route", "est_error"}, rows);
  if (profiles.size() == 2) {
    double diff = 0.0, kmax = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      diff = std::max(diff, std::abs(profiles[0].values[k] - profiles[1].values[k]));
      kmax = std::max(kmax, std::abs(profiles[0].values[k]));
    }
    r.manifest.errors.push_back({"two_route_max_diff", diff});
    r.manifest.checks.push_back({"two_route_agreement", diff <= 1e-5 * (1 + kmax)});
  }
  ordered_json lim = ordered_json::array();
  for (const auto& s : profiles.front().limits) lim.push_back({{"x", s.x}, {"left", s.left}, {"right", s.right}});
  r.manifest.extra.push_back({"singular_limits", lim.dump()});
  r.finish({r.common.out});
  return 0;
}

// ---------------- hamiltonian ----------------

struct HamArgs {
  double tmax = 2.5, dt = 0.01, resolve_tol = 1e-6;
  int n = 200, degree = 16;
  std::string method = "galerkin";
};

int run_hamiltonian(Run& r, const HamArgs& a) {
  check_params(r.common);
  const SelbergDatum L = resolve_datum(r.common);
  require_continuous(L, r.common.omega, r.common.nu);
  require_positive(a.dt, "--dt");
  require_positive(a.resolve_tol, "--resolve-tol");
  if (a.tmax < 0) throw ValidationError("--tmax must be >= 0");
  if (a.method != "galerkin" && a.method != "nystrom") throw ValidationError("--method must be galerkin or nystrom");
  echo_common(r, L);
  r.config.update({{"tmax", a.tmax}, {"dt", a.dt}, {"method", a.method}, {"n", a.n}, {"degree", a.degree},
                   {"resolve_tol", a.resolve_tol}});
  Timer tk;
  auto K = std::make_shared<KernelFunction>(L, r.common.omega, r.common.nu, std::max(2 * a.tmax, 0.5));
  r.manifest.timings.push_back({"kernel", tk.seconds()});
  Timer ts;
  HamiltonianProfile H;
  if (a.method == "galerkin") {
    FredholmSolver F(K, a.degree, a.resolve_tol);
    H = mu_m_gamma(F, a.tmax, a.dt);
  } else {
    H = mu_m_gamma_nystrom(*K, a.tmax, a.dt, a.n, a.resolve_tol);
  }
  r.manifest.timings.push_back({"fredholm_sweep", ts.seconds()});
  std::vector<std::vector<std::string>> rows;
  double worst = 0.0;
  for (std::size_t k = 0; k < H.t.size(); ++k) {
    if (H.resolved[k]) worst = std::max(worst, H.est_error[k]);
    rows.push_back({format_number(H.t[k]), format_number(H.det_plus[k]), format_number(H.det_minus[k]),
                    format_number(H.mu[k]), format_number(H.m_detratio[k]), format_number(H.m_expint[k]),
                    format_number(H.gamma[k]), format_number(H.q_plus_A[k]), format_number(H.q_minus_A[k]),
                    format_number(H.est_error[k]), format_number(H.q_plus_B[k]), format_number(H.q_plus_C[k]),
                    format_number(H.q_minus_B[k]), format_number(H.q_minus_C[k]), H.resolved[k] ? "1" : "0"});
  }
  write_csv(r.common.out,
            {"t", "det_plus", "det_minus", "mu", "m_detratio", "m_expint", "gamma", "q_plus", "q_minus", "est_error",
             "q_plus_B", "q_plus_C", "q_minus_B", "q_minus_C", "resolved"},
            rows);
  r.manifest.errors.push_back({"log_det", worst});
  r.manifest.errors.push_back({"two_path_m", H.max_two_path});
  r.manifest.errors.push_back({"q_routes", H.max_q_discrepancy});
  r.manifest.checks.push_back({"two_path_within_1e-3", H.max_two_path <= 1e-3});
  r.manifest.checks.push_back({"q_routes_within_1e-2", H.max_q_discrepancy <= 1e-2});
  r.manifest.checks.push_back({"resolved_to_tmax", std::isnan(H.horizon)});
  r.manifest.extra.push_back({"horizon", number_or_null(H.horizon).dump()});
  r.manifest.extra.push_back({"tau_probe", number_or_null(H.tau_probe).dump()});
  r.manifest.extra.push_back({"flagged", ordered_json(H.flagged).dump()});
  r.finish({r.common.out});
  return 0;
}

// ---------------- evolve ----------------

struct EvolveArgs {
  std::vector<std::string> z{"0+1i"};
  double tmax = 2.5, dt = 0.05, resolve_tol = 1e-6;
  int degree = 16;
};

int run_evolve(Run& r, const EvolveArgs& a) {
  check_params(r.common);
  const SelbergDatum L = resolve_datum(r.common);
  require_continuous(L, r.common.omega, r.common.nu);
  require_positive(a.dt, "--dt");
  if (a.tmax < 0) throw ValidationError("--tmax must be >= 0");
  std::vector<cplx> zs;
  for (const auto& s : a.z) zs.push_back(parse_complex(s));
  echo_common(r, L);
  r.config.update({{"z", a.z}, {"tmax", a.tmax}, {"dt", a.dt}, {"degree", a.degree}, {"resolve_tol", a.resolve_tol}});
  Timer t0;
  StructureFamily fam(L, r.common.omega, r.common.nu, a.tmax, a.degree, a.resolve_tol);
  const long n = long(std::floor(a.tmax / a.dt + 1e-9)) + 1;
  std::vector<std::vector<std::string>> rows;
  double horizon = std::numeric_limits<double>::quiet_NaN();
  const std::string nan = format_number(std::numeric_limits<double>::quiet_NaN());
  for (cplx z : zs) {
    bool stop = false;
    for (long k = 0; k < n; ++k) {
      const double t = double(k) * a.dt;
      std::vector<std::string> row = {format_number(t), format_number(z.real()), format_number(z.imag())};
      if (!stop && t > 0 && !fam.solver().slice(t)->resolved) {
        stop = true;
        if (std::isnan(horizon) || t < horizon) horizon = t;
      }
      if (stop) {
        row.insert(row.end(), {nan, nan, nan, nan, nan, "0"});
      } else {
        const EvolvedPair p = ab_eval(fam, t, z);
        const double J = j_eval(fam, t, z, z).real();
        row.insert(row.end(), {format_number(p.A.real()), format_number(p.A.imag()), format_number(p.B.real()),
                               format_number(p.B.imag()), format_number(J), "1"});
      }
      rows.push_back(row);
    }
  }
  write_csv(r.common.out, {"t", "z_re", "z_im", "A_re", "A_im", "B_re", "B_im", "J_diag", "resolved"}, rows);
  r.manifest.timings.push_back({"evolve", t0.seconds()});
  r.manifest.extra.push_back({"horizon", number_or_null(horizon).dump()});
  r.manifest.checks.push_back({"resolved_to_tmax", std::isnan(horizon)});
  r.finish({r.common.out});
  return 0;
}

// ---------------- reconstruct ----------------

struct ReconArgs {
  int samples = 10;
  double tol = 1e-6, xcut = 12.0;
};

int run_reconstruct(Run& r, const ReconArgs& a) {
  check_params(r.common);
  const SelbergDatum L = resolve_datum(r.common);
  require_continuous(L, r.common.omega, r.common.nu);
  if (a.samples < 1) throw ValidationError("--z-samples must be >= 1");
  require_positive(a.tol, "--tol");
  echo_common(r, L);
  r.config.update({{"z_samples", a.samples}, {"tol", a.tol}, {"xcut", a.xcut}});
  Timer t0;
  StructureFamily fam(L, r.common.omega, r.common.nu, 0.0);
  const double im0 = std::max(3.0, r.common.omega + 1.5);
  std::vector<std::vector<std::string>> rows;
  double worst = 0.0;
  for (int k = 0; k < a.samples; ++k) {
    const cplx z(-0.5 * (a.samples - 1) + k, im0 + 0.25 * k);
    const EvolvedPair p = ab_direct(fam, 0.0, z, a.xcut);
    const cplx E = fam.E(z);
    // A - iB = E is built in at t = 0; the components are what the kernel has to get right
    const double rel = std::max({std::abs(p.A - cplx(0, 1) * p.B - E), std::abs(p.A - fam.A(z)),
                                 std::abs(p.B - fam.B(z))}) / std::abs(E);
    worst = std::max(worst, rel);
    rows.push_back({format_number(z.real()), format_number(z.imag()), format_number(p.A.real()),
                    format_number(p.A.imag()), format_number(p.B.real()), format_number(p.B.imag()),
                    format_number(E.real()), format_number(E.imag()), format_number(rel)});
  }
  write_csv(r.common.out, {"z_re", "z_im", "A_re", "A_im", "B_re", "B_im", "E_re", "E_im", "rel_error"}, rows);
  r.manifest.timings.push_back({"reconstruct", t0.seconds()});
  r.manifest.errors.push_back({"reconstruction", worst});
  r.manifest.checks.push_back({"reconstruction_within_tol", worst <= a.tol});
  r.finish({r.common.out});
  if (worst > a.tol)
    throw NumericError("reconstruct", "max relative error " + format_number(worst) + " exceeds tolerance", a.tol);
  return 0;
}

// ---------------- hb ----------------

struct HBArgs {
  HBGrid grid;
  double umax = 30.0, refine_tol = 1e-10, scan_step = 0.05;
};

int run_hb(Run& r, const HBArgs& a) {
  check_params(r.common);
  const SelbergDatum L = resolve_datum(r.common);
  echo_common(r, L);
  r.config.update({{"re_min", a.grid.re_min}, {"re_max", a.grid.re_max}, {"im_max", a.grid.im_max},
                   {"step", a.grid.step}, {"umax", a.umax}, {"refine_tol", a.refine_tol}, {"scan_step", a.scan_step}});
  const Structure S{L, r.common.omega, r.common.nu};
  Timer t0;
  const HBReport h = hb_scan(S, a.grid);
  r.manifest.timings.push_back({"hb_scan", t0.seconds()});
  Timer t1;
  const ZeroLadder z = zero_scan(S, a.umax, a.refine_tol, a.scan_step);
  r.manifest.timings.push_back({"zero_scan", t1.seconds()});
  ordered_json rep;
  rep["params"] = {{"datum", L.label}, {"omega", r.common.omega}, {"nu", r.common.nu},
                   {"grid", {{"re_min", a.grid.re_min}, {"re_max", a.grid.re_max}, {"im_max", a.grid.im_max}, {"step", a.grid.step}}}};
  rep["regime"] = h.regime;
  rep["verdict"] = h.consistent ? "consistent-with-HB" : "violation-found";
  rep["max_abs_theta"] = h.max_abs_theta;
  rep["margin"] = h.margin;
  rep["real_axis_residual"] = h.real_axis_residual;
  rep["samples"] = h.samples;
  rep["skipped"] = h.skipped;
  rep["witnesses"] = ordered_json::array();
  if (!h.consistent)
    rep["witnesses"].push_back({{"re", h.witness.real()}, {"im", h.witness.imag()}, {"abs_theta", h.max_abs_theta},
                                {"confirmed", h.witness_confirmed}});
  rep["ladders"] = {{"A", z.zeros_A}, {"B", z.zeros_B}, {"refine_tol", z.refine_tol}, {"interlace_ok", z.interlace_ok},
                    {"first_violation", number_or_null(z.interlace_ok ? NAN : z.first_violation)},
                    {"suspected_double", z.suspected_double}, {"max_imag_rel", z.max_imag}};
  if (h.regime != "unconditional") rep["note"] = "evidence, not proof";
  write_text(r.common.out, rep.dump(2) + "\n");
  r.manifest.errors.push_back({"real_axis_unimodularity", h.real_axis_residual});
  r.manifest.checks.push_back({"hb_consistent", h.consistent});
  r.manifest.checks.push_back({"interlace", z.interlace_ok});
  r.finish({r.common.out});
  if (h.regime == "unconditional" && (!h.consistent || !z.interlace_ok))
    throw NumericError("hb", "Hermite-Biehler or interlacing violation in the unconditional regime");
  return 0;
}

// ---------------- grh-evidence ----------------

struct GRHArgs {
  std::string schedule = "1.2:1,0.8:2,0.6:2";
  double tmax = 2.0;
  std::vector<std::string> z{"1i"};
  GRHOptions opt;
};

int run_grh(Run& r, const GRHArgs& a) {
  const SelbergDatum L = resolve_datum(r.common);
  const auto schedule = parse_schedule(a.schedule);
  std::vector<cplx> zs;
  for (const auto& s : a.z) zs.push_back(parse_complex(s));
  if (a.tmax < 0) throw ValidationError("--tmax must be >= 0");
  r.config["l"] = r.common.l;
  r.config["datum"] = ordered_json::parse(datum_to_json_text(L));
  r.config.update({{"schedule", a.schedule}, {"tmax", a.tmax}, {"z", a.z}, {"omega0", a.opt.omega0},
                   {"dt", a.opt.dt}, {"j_dt", a.opt.j_dt}, {"degree", a.opt.degree}, {"resolve_tol", a.opt.resolve_tol},
                   {"out", r.common.out}});
  Timer t0;
  const GRHReport g = grh_evidence(L, schedule, a.tmax, zs, a.opt);
  r.manifest.timings.push_back({"grh_evidence", t0.seconds()});
  ordered_json rep;
  rep["params"] = {{"datum", g.datum}, {"schedule", a.schedule}, {"tmax", a.tmax}, {"omega0", g.omega0}, {"z", a.z}};
  rep["note"] = g.note;
  rep["runs"] = ordered_json::array();
  for (const auto& run : g.runs) {
    ordered_json jt = ordered_json::array();
    for (std::size_t k = 0; k < run.j_values.size(); ++k)
      jt.push_back({{"z", a.z[k]}, {"t", run.j_t}, {"J", run.j_values[k]}, {"strictly_decreasing", bool(run.j_decreasing[k])}});
    rep["runs"].push_back({{"omega", run.entry.omega}, {"nu", run.entry.nu}, {"label", run.label},
                           {"det_min", {{"plus", run.det_min_plus}, {"minus", run.det_min_minus}}},
                           {"probed_to", run.probed_to}, {"horizon", run.horizon},
                           {"tau_probe", number_or_null(run.tau_probe)}, {"completed", run.completed},
                           {"J_trend", jt}});
  }
  rep["omega_decreasing"] = g.omega_decreasing;
  write_text(r.common.out, rep.dump(2) + "\n");
  r.finish({r.common.out});
  return 0;
}

// ---------------- spectrum ----------------

struct SpecArgs {
  double theta = kPi / 2, umin = 0.0, umax = 30.0, refine_tol = 1e-10, scan_step = 0.05;
  int eigen_count = 0;
  double xmax = 3.0, dx = 0.01;
  std::string eigen_out = "spectrum_eigen.csv";
};

int run_spectrum(Run& r, const SpecArgs& a) {
  check_params(r.common);
  const SelbergDatum L = resolve_datum(r.common);
  echo_common(r, L);
  r.config.update({{"theta", a.theta}, {"umin", a.umin}, {"umax", a.umax}, {"refine_tol", a.refine_tol},
                   {"scan_step", a.scan_step}, {"eigen_count", a.eigen_count}, {"xmax", a.xmax}, {"dx", a.dx},
                   {"eigen_out", a.eigen_out}});
  const Structure S{L, r.common.omega, r.common.nu};
  Timer t0;
  const auto zs = theta_zeros(S, a.theta, a.umin, a.umax, a.refine_tol, a.scan_step);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < zs.size(); ++k)
    rows.push_back({std::to_string(k), format_number(zs[k]), format_number(std::abs(s_theta(S, a.theta, zs[k]).value))});
  write_csv(r.common.out, {"index", "gamma", "abs_S"}, rows);
  std::vector<std::string> outs = {r.common.out};
  if (a.eigen_count > 0) {
    require_continuous(L, r.common.omega, r.common.nu);
    require_positive(a.dx, "--dx");
    const KernelFunction K(L, r.common.omega, r.common.nu, a.xmax);
    const auto grid = uniform_grid(0.0, a.xmax, a.dx);
    const std::size_t m = std::min<std::size_t>(std::size_t(a.eigen_count), zs.size());
    std::vector<std::vector<cplx>> fs;
    std::vector<std::string> header = {"x"};
    for (std::size_t k = 0; k < m; ++k) {
      fs.push_back(eigenfunction(K, a.theta, zs[k], grid));
      header.push_back("f" + std::to_string(k) + "_re");
      header.push_back("f" + std::to_string(k) + "_im");
    }
    std::vector<std::vector<std::string>> er;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<std::string> row = {format_number(grid[i])};
      for (const auto& f : fs) {
        row.push_back(format_number(f[i].real()));
        row.push_back(format_number(f[i].imag()));
      }
      er.push_back(row);
    }
    write_csv(a.eigen_out, header, er);
    outs.push_back(a.eigen_out);
  }
  r.manifest.timings.push_back({"spectrum", t0.seconds()});
  r.finish(outs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  // --config FILE is expanded into trailing flags, so its values win
  try {
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (args[k] == "--config" || args[k].rfind("--config=", 0) == 0) {
        std::string path;
        if (args[k] == "--config") {
          if (k + 1 >= args.size()) throw ValidationError("--config needs a file");
          path = args[k + 1];
          args.erase(args.begin() + long(k), args.begin() + long(k) + 2);
        } else {
          path = args[k].substr(9);
          args.erase(args.begin() + long(k));
        }
        const auto extra = config_tokens(path);
        args.insert(args.end(), extra.begin(), extra.end());
        break;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "canon-forge: " << e.what() << "\n";
    return kExitValidation;
  }

  CLI::App app{"canon-forge: canonical systems attached to Selberg-class L-functions"};
  app.set_version_flag("--version", std::string(CANONFORGE_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Run run;
  KernelArgs ka;
  HamArgs ha;
  EvolveArgs ea;
  ReconArgs ra;
  HBArgs hba;
  GRHArgs ga;
  SpecArgs sa;

  auto* k = app.add_subcommand("kernel", "kernel K on a grid by the explicit and contour routes");
  add_common(k, run.common, "kernel.csv");
  k->add_option("--xmin", ka.xmin);
  k->add_option("--xmax", ka.xmax);
  k->add_option("--step", ka.step);
  k->add_option("--route", ka.route, "explicit, contour or both");
  k->add_option("--contour-c", ka.contour_c, "contour abscissa (default 1/2 + omega + 1)");
  k->add_option("--contour-U", ka.contour_U);
  k->add_option("--contour-du", ka.contour_du);

  auto* h = app.add_subcommand("hamiltonian", "Fredholm determinants, mu, m, gamma and q over a t grid");
  add_common(h, run.common, "ham.csv");
  h->add_option("--tmax", ha.tmax);
  h->add_option("--dt", ha.dt);
  h->add_option("--method", ha.method, "galerkin or nystrom");
  h->add_option("--n", ha.n, "Nystrom size (method nystrom)");
  h->add_option("--degree", ha.degree, "per-panel Legendre degree (method galerkin)");
  h->add_option("--resolve-tol", ha.resolve_tol);

  auto* e = app.add_subcommand("evolve", "A(t, z), B(t, z) and J(t; z, z) over a t grid");
  add_common(e, run.common, "evolve.csv");
  e->add_option("--z", ea.z, "complex point, repeatable")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  e->add_option("--tmax", ea.tmax);
  e->add_option("--dt", ea.dt);
  e->add_option("--degree", ea.degree);
  e->add_option("--resolve-tol", ea.resolve_tol);

  auto* rc = app.add_subcommand("reconstruct", "E(z) = A(0, z) - i B(0, z) through the kernel");
  add_common(rc, run.common, "reconstruct.csv");
  rc->add_option("--z-samples", ra.samples);
  rc->add_option("--tol", ra.tol);
  rc->add_option("--xcut", ra.xcut, "half-line integral cut-off");

  auto* hb = app.add_subcommand("hb", "Hermite-Biehler sampling and zero ladders");
  add_common(hb, run.common, "hb.json");
  hb->add_option("--re-min", hba.grid.re_min);
  hb->add_option("--re-max", hba.grid.re_max);
  hb->add_option("--im-max", hba.grid.im_max);
  hb->add_option("--step", hba.grid.step);
  hb->add_option("--umax", hba.umax);
  hb->add_option("--refine-tol", hba.refine_tol);
  hb->add_option("--scan-step", hba.scan_step);

  auto* g = app.add_subcommand("grh-evidence", "determinant and J trends along an (omega, nu) schedule");
  add_common(g, run.common, "grh.json");
  g->add_option("--schedule", ga.schedule, "omega:nu pairs, comma separated");
  g->add_option("--tmax", ga.tmax);
  g->add_option("--z", ga.z, "complex point, repeatable")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  g->add_option("--omega0", ga.opt.omega0);
  g->add_option("--dt", ga.opt.dt);
  g->add_option("--j-dt", ga.opt.j_dt);
  g->add_option("--degree", ga.opt.degree);
  g->add_option("--resolve-tol", ga.opt.resolve_tol);

  auto* sp = app.add_subcommand("spectrum", "zeros of S_theta and eigenfunctions f_{theta, gamma}");
  add_common(sp, run.common, "spectrum.csv");
  sp->add_option("--theta", sa.theta);
  sp->add_option("--umin", sa.umin);
  sp->add_option("--umax", sa.umax);
  sp->add_option("--refine-tol", sa.refine_tol);
  sp->add_option("--scan-step", sa.scan_step);
  sp->add_option("--eigen-count", sa.eigen_count);
  sp->add_option("--xmax", sa.xmax);
  sp->add_option("--dx", sa.dx);
  sp->add_option("--eigen-out", sa.eigen_out);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    run.manifest.version = CANONFORGE_VERSION;
    run.manifest.argv = std::vector<std::string>(argv + 1, argv + argc);
    run.manifest.threads = threads_from_env();
    run.config["threads"] = run.manifest.threads;
    int rc_code = 0;
    auto* sub = app.get_subcommands().front();
    run.manifest.command = sub->get_name();
    if (sub == k) rc_code = run_kernel(run, ka);
    else if (sub == h) rc_code = run_hamiltonian(run, ha);
    else if (sub == e) rc_code = run_evolve(run, ea);
    else if (sub == rc) rc_code = run_reconstruct(run, ra);
    else if (sub == hb) rc_code = run_hb(run, hba);
    else if (sub == g) rc_code = run_grh(run, ga);
    else if (sub == sp) rc_code = run_spectrum(run, sa);
    return rc_code;
  } catch (const ValidationError& ex) {
    std::cerr << "canon-forge: validation error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const NumericError& ex) {
    std::cerr << "canon-forge: numeric error in stage '" << ex.stage << "' (tolerance " << ex.tolerance
              << "): " << ex.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "canon-forge: validation error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& ex) {
    std::cerr << "canon-forge: numeric error: " << ex.what() << "\n";
    return kExitNumeric;
  }
}
