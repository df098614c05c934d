#pragma once
#include <string>
#include <utility>
#include <vector>

#include "canonforge/canon.hpp"

namespace cf {

// Rectangle [re_min, re_max] x [im_step, im_max] sampled with one step in both directions.
struct HBGrid {
  double re_min = -30.0, re_max = 30.0, im_max = 5.0, step = 0.25;
  double e_floor = 1e-12;
};

struct HBReport {
  HBGrid grid;
  long samples = 0, skipped = 0;
  double max_abs_theta = 0.0;
  double margin = 1.0;                 // 1 - max |Theta|
  double real_axis_residual = 0.0;     // max ||Theta(u)| - 1|
  bool consistent = true;              // all sampled |Theta| < 1
  cplx witness{0.0, 0.0};
  bool witness_confirmed = false;
  std::string regime;                  // "unconditional" or "evidence only (conditional regime)"
};

HBReport hb_scan(const Structure& S, const HBGrid& grid = {});

struct ZeroLadder {
  std::vector<double> zeros_A, zeros_B;  // B always contains 0
  double refine_tol = 0.0;
  bool interlace_ok = true;
  double first_violation = 0.0;
  std::vector<double> suspected_double;  // |value| / |E| dips without a sign change
  double max_imag = 0.0;                 // realness check of A, B on the axis
};

ZeroLadder zero_scan(const Structure& S, double u_max, double refine_tol = 1e-10, double step = 0.05);
// Sign-change count of f on [0, u_max] with the given step, used as an independent recount.
long count_sign_changes(const Structure& S, bool use_A, double u_max, double step);

// Real zeros of S_theta in [u_min, u_max]: sign changes of Im(e^{i theta} E(u)) refined by bisection.
std::vector<double> theta_zeros(const Structure& S, double theta, double u_min, double u_max, double refine_tol = 1e-10,
                                double step = 0.05);

struct SThetaValue {
  cplx value;
  std::string reduces_to;  // "2iA" at theta = pi/2, "-2iB" at theta = 0, else empty
};
SThetaValue s_theta(const Structure& S, double theta, cplx z);

// f(x) = e^{-i gamma x}(1_{[0,inf)}(x) - e^{-2 i theta} int_0^x K(y) e^{i gamma y} dy).
std::vector<cplx> eigenfunction(const KernelFunction& K, double theta, double gamma, const std::vector<double>& x);

struct ScheduleEntry {
  double omega;
  int nu;
};
// "1.2:1,0.8:2" -> entries
std::vector<ScheduleEntry> parse_schedule(const std::string& text);

struct GRHRun {
  ScheduleEntry entry;
  double det_min_plus = 0.0, det_min_minus = 0.0;  // over resolved probed t
  double horizon = 0.0, tau_probe = 0.0;
  double probed_to = 0.0;
  bool completed = true;
  std::string label;
  std::vector<double> j_t;
  std::vector<std::vector<double>> j_values;  // per z, J(t; z, z)
  std::vector<bool> j_decreasing;
};

struct GRHReport {
  std::string datum;
  double omega0 = 0.0;
  std::vector<cplx> z_list;
  std::vector<GRHRun> runs;
  bool omega_decreasing = true;
  std::string note;
};

struct GRHOptions {
  double dt = 0.01;
  double j_dt = 0.05;
  double omega0 = 0.0;
  int degree = 16;
  double resolve_tol = 1e-6;
};

GRHReport grh_evidence(const SelbergDatum& L, const std::vector<ScheduleEntry>& schedule, double t_max,
                       const std::vector<cplx>& z_list, const GRHOptions& opt = {});

}  // namespace cf
