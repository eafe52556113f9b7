// blowuplab command-line front end.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure,
// 4 t_max reached where blow-up was required.

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blowuplab/bessel.hpp"
#include "blowuplab/classify.hpp"
#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/io.hpp"
#include "blowuplab/kato.hpp"
#include "blowuplab/pde/config.hpp"
#include "blowuplab/pde/identities.hpp"
#include "blowuplab/pde/solver.hpp"
#include "blowuplab/pde/sweep.hpp"
#include "blowuplab/phase_diagram.hpp"
#include "blowuplab/specialfn.hpp"
#include "blowuplab/volterra.hpp"

using namespace blowuplab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoBlowup = 4;

struct Globals {
  std::string config;
  std::string out;
  int threads = 0;
};

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  auto f = open_output(path);
  write(f);
  if (!f) throw validation_error("write failed: " + path);
}

void emit_json(const std::string& path, const json& j) {
  emit(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

json opt_json(const std::optional<double>& v) { return v ? ext_to_json(*v) : json(nullptr); }

// --- classify / critical ------------------------------------------------------------

struct ClassifyArgs {
  std::string thm = "thm1";
  int n = 1;
  double mu1 = 0.0, mu2 = 0.0, mu = 0.0;
  double nu1 = 0.0, nu2 = -1.0, beta = 2.0;
  double p = 2.0;
};

int run_classify(const ClassifyArgs& a, const Globals& g) {
  Regime r;
  json j{{"theorem", a.thm}, {"n", a.n}, {"p", a.p}};
  if (a.thm == "thm1" || a.thm == "h0") {
    r = a.thm == "thm1" ? classify_thm1(a.n, a.mu1, a.mu2, a.p) : classify_h0(a.n, a.mu1, a.mu2, a.p);
    j["mu1"] = a.mu1;
    j["mu2"] = a.mu2;
    j["delta"] = discriminant(a.mu1, a.mu2);
  } else if (a.thm == "cor1" || a.thm == "cor2") {
    r = a.thm == "cor1" ? classify_cor1(a.n, a.mu, a.p) : classify_cor2(a.n, a.mu, a.p);
    j["mu"] = a.mu;
  } else if (a.thm == "negmass") {
    const ScatteringParams sp{a.n, a.nu1, a.nu2, a.beta};
    r = classify_negmass(sp, a.p);
    j["nu1"] = a.nu1;
    j["nu2"] = a.nu2;
    j["beta"] = a.beta;
    j["delta"] = sp.delta();
  } else {
    throw validation_error("unknown theorem id: " + a.thm);
  }
  j["regime"] = to_json(r);
  j["branch"] = std::string(to_string(r.branch));
  j["exponent"] = r.law ? json(r.law->exponent()) : json(nullptr);
  emit_json(g.out, j);
  return kExitOk;
}

int run_critical(const ClassifyArgs& a, const Globals& g) {
  const ModelParams mp{a.n, a.mu1, a.mu2};
  const auto s = derive_scales(mp);
  const double pc = critical_exponent_thm1(a.n, a.mu1, s.delta);
  json j{{"n", a.n},
         {"mu1", a.mu1},
         {"mu2", a.mu2},
         {"delta", s.delta},
         {"sqrt_delta", opt_json(s.sqrt_delta)},
         {"kappa", opt_json(s.kappa)},
         {"lambda", opt_json(s.lambda)},
         {"p_crit", ext_to_json(pc)},
         {"p_fujita", ext_to_json(fujita_exponent(a.n + *s.kappa))},
         {"p_strauss", ext_to_json(strauss_exponent(a.n + a.mu1))},
         {"p_crit_massless", ext_to_json(critical_exponent_massless(a.n, a.mu1))},
         {"d_star", s.d_star},
         {"mu_star", ext_to_json(s.mu_star)},
         {"theta", ext_to_json(s.theta)},
         {"p_star", opt_json(s.p_star)},
         {"r_star", opt_json(s.r_star)}};
  emit_json(g.out, j);
  return kExitOk;
}

// --- phase diagram ---------------------------------------------------------------------

struct PhaseArgs {
  int n = 1;
  std::string theorem = "cor1";
  double p_min = 1.0, p_max = 6.0;
  double mu_min = 0.0, mu_max = 5.0;
  double mu1 = 0.0;
  int resolution = 200;
  std::string boundary, svg;
};

int run_phase(const PhaseArgs& a, const Globals& g) {
  const auto d = phase_diagram(a.n, a.theorem, {a.p_min, a.p_max}, {a.mu_min, a.mu_max}, a.resolution, a.mu1);
  emit(g.out, [&](std::ostream& o) { write_phase_csv(o, d); });
  if (!a.boundary.empty()) emit(a.boundary, [&](std::ostream& o) { write_boundary_csv(o, d); });
  if (!a.svg.empty()) emit(a.svg, [&](std::ostream& o) { write_phase_svg(o, d); });
  return kExitOk;
}

// --- kato ----------------------------------------------------------------------------------

struct KatoArgs {
  KatoInput in;
  int j_max = 25;
  ExtremalOptions ext;
};

int run_kato_report(const KatoArgs& a, const Globals& g) {
  const auto d = amplification_constant(a.in);
  const auto tr = iterate(a.in, a.j_max);
  json trace = json::array();
  for (int j = 1; j <= tr.j_max; ++j)
    trace.push_back({{"j", j},
                     {"a", tr.a_seq[j - 1]},
                     {"b", tr.b_seq[j - 1]},
                     {"c", tr.c_seq[j - 1]},
                     {"logD", tr.logD_seq[j - 1]}});
  emit_json(g.out, {{"gamma", d.gamma},
                    {"C_tilde", d.C_tilde},
                    {"S_inf", d.S_inf},
                    {"T_tilde", d.T_tilde},
                    {"C_amp", d.C_amp},
                    {"J", d.J},
                    {"T_tilde_after_T0", d.T_tilde_after_T0},
                    {"truncated", tr.truncated},
                    {"trace", trace}});
  return kExitOk;
}

int run_kato_threshold(const KatoArgs& a, const Globals& g) {
  emit_json(g.out, {{"gamma", kato_gamma(a.in.p, a.in.a, a.in.b)}, {"T_tilde", threshold_time(a.in)}});
  return kExitOk;
}

int run_kato_extremal(const KatoArgs& a, const Globals& g) {
  const auto r = synthesize_extremal(a.in, a.ext);
  emit(g.out, [&](std::ostream& o) {
    o << "t,F\n";
    for (std::size_t i = 0; i < r.F.t.size(); ++i) o << fmt17(r.F.t[i]) << ',' << fmt17(r.F.F[i]) << '\n';
  });
  if (!r.blew_up) {
    std::cerr << "extremal did not blow up before t_max\n";
    return kExitNoBlowup;
  }
  std::cerr << "blow-up time " << fmt17(r.blowup_time) << '\n';
  return kExitOk;
}

// --- special functions ---------------------------------------------------------------------

struct SpecialArgs {
  double nu = 0.5, z = 1.0;
  int n = 1;
  double r = 1.0;
  double p = 2.0, t_min = 1.0, t_max = 100.0, R = 1.0;
  int count = 41;
};

int run_bessel(const SpecialArgs& a, const Globals& g) {
  emit_json(g.out, {{"nu", a.nu},
                    {"z", a.z},
                    {"I", ext_to_json(bessel_I(a.nu, a.z))},
                    {"K", ext_to_json(bessel_K(a.nu, a.z))},
                    {"I_prime", ext_to_json(bessel_I_prime(a.nu, a.z))},
                    {"K_prime", ext_to_json(bessel_K_prime(a.nu, a.z))},
                    {"I_scaled", bessel_i_scaled(a.nu, a.z)},
                    {"K_scaled", bessel_k_scaled(a.nu, a.z)}});
  return kExitOk;
}

int run_phi1(const SpecialArgs& a, const Globals& g) {
  emit_json(g.out, {{"n", a.n}, {"r", a.r}, {"phi1", ext_to_json(phi1(a.r, a.n))}, {"log_phi1", log_phi1(a.r, a.n)}});
  return kExitOk;
}

int run_yz(const SpecialArgs& a, const Globals& g) {
  const auto s = yz_sweep(a.n, a.p, a.t_min, a.t_max, a.count, a.R);
  emit(g.out, [&](std::ostream& o) {
    o << "t,ratio\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) o << fmt17(s.t[i]) << ',' << fmt17(s.ratio[i]) << '\n';
  });
  std::cerr << "log-log slope " << fmt17(s.log_slope) << '\n';
  return kExitOk;
}

// --- simulation ------------------------------------------------------------------------------

struct SimArgs {
  std::vector<std::string> set;
  std::string report;
  bool require_blowup = false;
  std::vector<double> eps;
  double tolerance = 0.2;
  std::string csv;
  int levels = 3;
};

pde::SimConfig build_config(const SimArgs& a, const Globals& g) {
  pde::SimConfig c = g.config.empty() ? pde::SimConfig{} : pde::load_config(g.config);
  for (const auto& kv : a.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw validation_error("--set expects section.key=value, got " + kv);
    pde::set_option(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

json sim_summary(const pde::SimResult& r) {
  return {{"status", pde::to_string(r.status)},
          {"T_est", opt_json(r.T_est)},
          {"T_est_refined", opt_json(r.T_est_refined)},
          {"threshold_sensitivity", r.threshold_sensitivity},
          {"steps", r.steps},
          {"samples", r.series.size()},
          {"max_front_excess", r.max_front_excess},
          {"message", r.message}};
}

int run_simulate(const SimArgs& a, const Globals& g) {
  const auto c = build_config(a, g);
  const auto r = pde::run(c);
  emit(g.out, [&](std::ostream& o) { pde::write_series_csv(o, r); });
  if (!a.report.empty()) emit_json(a.report, sim_summary(r));
  if (r.status == pde::SimStatus::NumericalFailure) {
    std::cerr << "numerical failure: " << r.message << '\n';
    return kExitNumerical;
  }
  if (r.status == pde::SimStatus::BlewUp) std::cerr << "blow-up at T_est = " << fmt17(*r.T_est) << '\n';
  if (a.require_blowup && r.status == pde::SimStatus::ReachedTmax) {
    std::cerr << "reached t_max without blow-up\n";
    return kExitNoBlowup;
  }
  return kExitOk;
}

int run_sweep(const SimArgs& a, const Globals& g) {
  const auto c = build_config(a, g);
  pde::SweepOptions opt;
  opt.tolerance = a.tolerance;
  opt.threads = g.threads;
  const auto f = pde::sweep(c, a.eps, opt);
  emit_json(g.out, pde::to_json(f));
  if (!a.csv.empty()) emit(a.csv, [&](std::ostream& o) { pde::write_sweep_csv(o, f); });
  if (f.partial) {
    std::cerr << "partial sweep: some runs reached t_max without blow-up\n";
    return kExitNoBlowup;
  }
  return kExitOk;
}

int run_verify(const SimArgs& a, const Globals& g) {
  const auto c = build_config(a, g);
  const auto cv = pde::identity_convergence(c, a.levels);
  json levels = json::array();
  for (std::size_t k = 0; k < cv.dr.size(); ++k) {
    const auto& r = cv.reports[k];
    levels.push_back({{"dr", cv.dr[k]},
                      {"f0_residual", r.f0_residual},
                      {"lm_residual", opt_json(r.lm_residual)},
                      {"f1_residual", r.f1_residual},
                      {"L_positive_after", opt_json(r.L_positive_after)},
                      {"overG_residual", opt_json(r.overG_residual)},
                      {"comparison_margin", opt_json(r.comparison_margin)}});
  }
  emit_json(g.out, {{"levels", levels},
                    {"lm_order", opt_json(cv.lm_order)},
                    {"f0_order", cv.f0_order},
                    {"f1_order", cv.f1_order}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blow-up and lifespan laboratory for damped semilinear wave equations", "blowuplab"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Simulation config file ([model], [data], [grid], [stopping])");
  app.add_option("--out", g.out, "Output path for the primary payload (stdout when empty)");
  app.add_option("--threads", g.threads, "Sweep worker threads (0: BLOWUPLAB_THREADS, then hardware)")
      ->check(CLI::NonNegativeNumber);

  std::function<int()> action;

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Blow-up regime and lifespan law (JSON)");
  classify->add_option("--thm", ca.thm, "Theorem family")->check(CLI::IsMember({"thm1", "cor1", "cor2", "h0", "negmass"}));
  classify->add_option("--n", ca.n, "Space dimension");
  classify->add_option("--mu1", ca.mu1, "Damping coefficient (thm1, h0)");
  classify->add_option("--mu2", ca.mu2, "Mass coefficient (thm1, h0)");
  classify->add_option("--mu", ca.mu, "Damping coefficient of the massless problem (cor1, cor2)");
  classify->add_option("--nu1", ca.nu1, "Scattering damping coefficient (negmass)");
  classify->add_option("--nu2", ca.nu2, "Negative mass coefficient (negmass)");
  classify->add_option("--beta", ca.beta, "Scattering damping decay exponent (negmass)");
  classify->add_option("--p", ca.p, "Nonlinearity power");
  classify->callback([&] { action = [&] { return run_classify(ca, g); }; });

  ClassifyArgs cr;
  auto* critical = app.add_subcommand("critical", "Critical exponents and derived scales (JSON)");
  critical->add_option("--n", cr.n, "Space dimension");
  critical->add_option("--mu1", cr.mu1, "Damping coefficient");
  critical->add_option("--mu2", cr.mu2, "Mass coefficient");
  critical->callback([&] { action = [&] { return run_critical(cr, g); }; });

  PhaseArgs pa;
  auto* phase = app.add_subcommand("phase-diagram", "Region map CSV p,mu,branch,exponent,log_power");
  phase->add_option("--n", pa.n, "Space dimension");
  phase->add_option("--theorem", pa.theorem, "Theorem family")->check(CLI::IsMember(phase_theorems()));
  phase->add_option("--p-min", pa.p_min, "Lower p bound");
  phase->add_option("--p-max", pa.p_max, "Upper p bound");
  phase->add_option("--mu-min", pa.mu_min, "Lower mu (or sqrt(delta)) bound");
  phase->add_option("--mu-max", pa.mu_max, "Upper mu (or sqrt(delta)) bound");
  phase->add_option("--mu1", pa.mu1, "Fixed mu1 for the delta families (thm1, h0)");
  phase->add_option("--resolution", pa.resolution, "Cells per axis");
  phase->add_option("--boundary", pa.boundary, "Boundary polyline CSV path");
  phase->add_option("--svg", pa.svg, "SVG region map path");
  phase->callback([&] { action = [&] { return run_phase(pa, g); }; });

  KatoArgs ka;
  auto* kato = app.add_subcommand("kato", "Kato-type iteration lemma");
  kato->require_subcommand(1);
  auto add_kato_options = [&](CLI::App* s) {
    s->add_option("--p", ka.in.p, "Nonlinearity power");
    s->add_option("--a", ka.in.a, "Power of t in the source");
    s->add_option("--b", ka.in.b, "Power of t in the kernel");
    s->add_option("--c", ka.in.c, "Power of ln(1+t) in the source");
    s->add_option("--T0", ka.in.T0, "Start time");
    s->add_option("--E", ka.in.E, "Data size");
    s->add_option("--A", ka.in.A, "Source constant");
    s->add_option("--B", ka.in.B, "Kernel constant");
  };
  auto* kreport = kato->add_subcommand("report", "Derived constants and iteration trace (JSON)");
  add_kato_options(kreport);
  kreport->add_option("--j-max", ka.j_max, "Trace length");
  kreport->callback([&] { action = [&] { return run_kato_report(ka, g); }; });
  auto* kthreshold = kato->add_subcommand("threshold", "Threshold time T~ (JSON)");
  add_kato_options(kthreshold);
  kthreshold->callback([&] { action = [&] { return run_kato_threshold(ka, g); }; });
  auto* kextremal = kato->add_subcommand("extremal", "Extremal Volterra solution (CSV t,F)");
  add_kato_options(kextremal);
  kextremal->add_option("--eta", ka.ext.eta, "Step as a fraction of the local time scale");
  kextremal->add_option("--cap", ka.ext.cap, "Blow-up declared when F exceeds cap * F(t0)");
  kextremal->add_option("--t-max", ka.ext.t_max, "Give up after this time");
  kextremal->callback([&] { action = [&] { return run_kato_extremal(ka, g); }; });

  SpecialArgs sa;
  auto* special = app.add_subcommand("special", "Special functions");
  special->require_subcommand(1);
  auto* sbessel = special->add_subcommand("bessel", "Modified Bessel I, K and derivatives (JSON)");
  sbessel->add_option("--nu", sa.nu, "Order");
  sbessel->add_option("--z", sa.z, "Argument");
  sbessel->callback([&] { action = [&] { return run_bessel(sa, g); }; });
  auto* sphi = special->add_subcommand("phi1", "Radial eigenfunction phi_1 (JSON)");
  sphi->add_option("--n", sa.n, "Space dimension");
  sphi->add_option("--r", sa.r, "Radius");
  sphi->callback([&] { action = [&] { return run_phi1(sa, g); }; });
  auto* syz = special->add_subcommand("yz-check", "Ratio of the psi_1 integral to its bound (CSV t,ratio)");
  syz->add_option("--n", sa.n, "Space dimension");
  syz->add_option("--p", sa.p, "Nonlinearity power");
  syz->add_option("--t-min", sa.t_min, "First time");
  syz->add_option("--t-max", sa.t_max, "Last time");
  syz->add_option("--count", sa.count, "Log-spaced samples");
  syz->add_option("--R", sa.R, "Support radius");
  syz->callback([&] { action = [&] { return run_yz(sa, g); }; });

  SimArgs ma;
  ma.eps = {0.2, 0.1, 0.05, 0.025};
  auto add_set = [&](CLI::App* s) {
    s->add_option("--set", ma.set, "Config override section.key=value (repeatable)");
  };
  auto* simulate = app.add_subcommand("simulate", "Radial PDE run (CSV t,F0,F1,supnorm)");
  add_set(simulate);
  simulate->add_option("--report", ma.report, "Run summary JSON path");
  simulate->add_flag("--require-blowup", ma.require_blowup, "Exit 4 when t_max is reached without blow-up");
  simulate->callback([&] { action = [&] { return run_simulate(ma, g); }; });

  auto* sweep = app.add_subcommand("sweep", "Lifespan scaling fit over an eps grid (JSON)");
  add_set(sweep);
  sweep->add_option("--eps", ma.eps, "Decreasing geometric eps grid")->delimiter(',');
  sweep->add_option("--tolerance", ma.tolerance, "Pass tolerance on |slope + predicted|");
  sweep->add_option("--csv", ma.csv, "CSV eps,T_est path");
  sweep->callback([&] { action = [&] { return run_sweep(ma, g); }; });

  auto* verify = app.add_subcommand("verify", "Functional identity residuals under refinement (JSON)");
  add_set(verify);
  verify->add_option("--levels", ma.levels, "Refinement levels (dr halved each level)");
  verify->callback([&] { action = [&] { return run_verify(ma, g); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  try {
    return action();
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
