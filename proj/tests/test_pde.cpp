#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "blowuplab/pde/identities.hpp"
#include "blowuplab/pde/solver.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace blowuplab;
using namespace blowuplab::pde;

namespace {

SimConfig smooth_config() {
  SimConfig c;
  c.model.n = 1;
  c.model.mu1 = 2.0;
  c.model.mu2 = 0.0;
  c.p = 3.0;
  c.eps = 0.1;
  c.grid.dr = 0.01;
  c.grid.r_max = 6.0;
  c.stopping.t_max = 5.0;
  return c;
}

SimConfig linear_config(int n, double mu1) {
  SimConfig c = smooth_config();
  c.model.n = n;
  c.model.mu1 = mu1;
  c.model.nonlinear = false;
  c.data.data_class = DataClass::Custom;
  c.data.g_ratio = 0.0;
  c.stopping.t_max = 1.0;
  c.grid.r_max = 3.0;
  return c;
}

SimConfig ode_config(double p, double u0, double v0) {
  SimConfig c;
  c.model.laplacian = false;
  c.data.shape = Shape::Flat;
  c.data.amplitude = u0;
  c.data.data_class = DataClass::Custom;
  c.data.g_ratio = v0 / u0;
  c.eps = 1.0;
  c.p = p;
  c.grid.dr = 0.5;
  c.grid.r_max = 1.0;
  c.stopping.t_max = 100.0;
  return c;
}

// d'Alembert solution of the 1-D linear problem with g = 0, evaluated on the even extension.
double dalembert(const SimConfig& c, double r, double t) {
  return c.eps * 0.5 * (profile(c.data, std::abs(r - t)) + profile(c.data, r + t));
}

double discrete_energy(const Simulator& s) {
  const auto& g = s.grid();
  const auto& u = s.state().u;
  const auto& v = s.state().v;
  double e = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    e += 0.5 * g.vol[i] * v[i] * v[i];
    if (i + 1 < g.size()) e += 0.5 * g.area[i + 1] * (u[i + 1] - u[i]) * (u[i + 1] - u[i]) / g.dr;
  }
  return e;
}

}  // namespace

// --- configuration -----------------------------------------------------------------

TEST(Config, DefaultsValidate) {
  EXPECT_NO_THROW(SimConfig{}.validate());
  const auto c = parse_config_string("");
  EXPECT_EQ(c.p, SimConfig{}.p);
}

TEST(Config, ParsesAllSections) {
  const auto c = parse_config_string(
      "[model]\nkind = scale_invariant\nn = 2\nmu1 = 3\nmu2 = 0.5\np = 2.5\n"
      "[data]\neps = 0.05\nshape = poly\nsupport_radius = 2\nclass = h_zero\n"
      "[grid]\ndr = 0.02\nr_max = 20\ncfl = 0.4\n[stopping]\nt_max = 15\nblowup_factor = 1e8\n");
  EXPECT_EQ(c.model.n, 2);
  EXPECT_EQ(c.model.mu1, 3.0);
  EXPECT_EQ(c.p, 2.5);
  EXPECT_EQ(c.data.shape, Shape::Poly);
  EXPECT_EQ(c.data.data_class, DataClass::HZero);
  EXPECT_EQ(c.grid.cfl, 0.4);
  EXPECT_EQ(c.stopping.blowup_factor, 1e8);
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(parse_config_string("[model]\nmu3 = 1\n"), validation_error);
  EXPECT_THROW(parse_config_string("[solver]\ndt = 1\n"), validation_error);
  EXPECT_THROW(parse_config_string("[model]\np = two\n"), validation_error);
  EXPECT_THROW(parse_config_string("[model]\nn = 1.5\n"), validation_error);
  EXPECT_THROW(parse_config_string("[data]\nclass = positive\n"), validation_error);
}

TEST(Config, Invariants) {
  SimConfig c = smooth_config();
  c.grid.r_max = 5.5;  // < t_max + R
  EXPECT_THROW(c.validate(), validation_error);
  c = smooth_config();
  c.grid.dr = 0.007;  // does not divide 6
  EXPECT_THROW(c.validate(), validation_error);
  c = smooth_config();
  c.grid.cfl = 1.0;
  EXPECT_THROW(c.validate(), validation_error);
  c = smooth_config();
  c.model.mu2 = 1.0;  // delta = 1 - 4 < 0
  EXPECT_THROW(c.validate(), unsupported_regime);
  c.data.data_class = DataClass::Custom;
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, WriteParseRoundTrip) {
  SimConfig c = smooth_config();
  c.model.kind = ModelKind::Scattering;
  c.model.nu1 = 0.7;
  c.model.nu2 = -0.3;
  c.model.beta = 2.5;
  c.data.shape = Shape::Poly;
  c.stopping.sample_stride = 4;
  std::ostringstream out;
  write_config(out, c);
  const auto d = parse_config_string(out.str());
  std::ostringstream again;
  write_config(again, d);
  EXPECT_EQ(out.str(), again.str());
  EXPECT_EQ(d.model.nu1, 0.7);
  EXPECT_EQ(d.stopping.sample_stride, 4);
}

// --- initial data ----------------------------------------------------------------------

TEST(InitialData, HZeroHasVanishingIntegrals) {
  for (double mu1 : {0.0, 2.0, 4.5}) {
    SimConfig c = smooth_config();
    c.model.mu1 = mu1;
    c.model.mu2 = 0.2;
    c.data.data_class = DataClass::HZero;
    const auto g = make_grid(c.model.n, c.grid.dr, c.grid.cells());
    const auto d = make_initial_data(c, g);
    EXPECT_LT(std::abs(d.int_h), 1e-14 * d.int_f) << mu1;
    EXPECT_LT(std::abs(d.int_h_phi1), 1e-14 * d.int_f_phi1) << mu1;
  }
}

TEST(InitialData, HPositiveAndSupport) {
  SimConfig c = smooth_config();  // mu1 = 2, mu2 = 0: h = f + g
  c.data.R = 1.5;
  c.grid.r_max = 6.5;
  const auto g = make_grid(c.model.n, c.grid.dr, c.grid.cells());
  const auto d = make_initial_data(c, g);
  EXPECT_DOUBLE_EQ(d.h_coef, 1.0);
  for (int i = 0; i < g.size(); ++i) {
    if (g.r[i] >= c.data.R) { EXPECT_EQ(d.f[i], 0.0); }
    if (d.f[i] > 0) { EXPECT_GT(d.h_coef * d.f[i] + d.g[i], 0.0); }
  }
  EXPECT_GT(d.int_h, 0.0);
  EXPECT_GT(d.int_h_phi1, 0.0);
}

TEST(InitialData, HPositiveNeedsPositiveH) {
  SimConfig c = smooth_config();
  c.model.mu1 = -6.0;  // h = ((-7 + 7)/2) f + f ... choose mu2 so that h_coef < -1
  c.model.mu2 = 12.0;  // delta = 49 - 48 = 1, h_coef = (-7 + 1)/2 = -3
  EXPECT_THROW(run(c), validation_error);
}

// --- time stepping ---------------------------------------------------------------------

TEST(Step, ZeroDataStaysZero) {
  SimConfig c = smooth_config();
  c.eps = 0.0;
  Simulator s(c);
  const auto r = s.run();
  EXPECT_EQ(r.status, SimStatus::ReachedTmax);
  for (double u : s.state().u) EXPECT_EQ(u, 0.0);
}

TEST(Step, DalembertSecondOrder) {
  double prev = 0.0;
  for (double dr : {0.01, 0.005, 0.0025}) {
    SimConfig c = linear_config(1, 0.0);
    c.grid.dr = dr;
    Simulator s(c);
    s.run();
    double err = 0.0;
    for (int i = 0; i < s.grid().size(); ++i)
      err = std::max(err, std::abs(s.state().u[i] - dalembert(c, s.grid().r[i], 1.0)));
    EXPECT_LT(err, 5e-3 * c.eps);
    if (prev > 0) { EXPECT_GT(std::log2(prev / err), 1.8) << dr; }
    prev = err;
  }
}

TEST(Step, DampedLinearEnergyNonIncreasing) {
  for (int n : {1, 2, 3}) {
    SimConfig c = linear_config(n, 2.0);
    c.data.g_ratio = 1.0;
    Simulator s(c);
    double e = discrete_energy(s);
    const double e0 = e;
    while (s.state().t < c.stopping.t_max) {
      s.step(s.next_dt(c.stopping.t_max));
      const double next = discrete_energy(s);
      EXPECT_LE(next, e + 1e-6 * e0) << n << " t=" << s.state().t;
      e = next;
    }
    EXPECT_LT(e, e0);
  }
}

// The scheme moves information one cell per step, so u vanishes exactly beyond
// R + steps * dr. Ahead of the light cone it leaves a dispersive precursor that
// is small and shrinks under refinement.
TEST(Step, FiniteSpeed) {
  SimConfig c = smooth_config();
  c.grid.r_max = 8.0;
  Simulator s(c);
  long steps = 0;
  while (s.state().t < c.stopping.t_max) {
    s.step(s.next_dt(c.stopping.t_max));
    ++steps;
  }
  double sup = 0.0, beyond = 0.0;
  for (int i = 0; i < s.grid().size(); ++i) {
    const double r = s.grid().r[i], u = std::abs(s.state().u[i]);
    sup = std::max(sup, u);
    if (r > c.data.R + steps * c.grid.dr) { EXPECT_EQ(u, 0.0) << r; }
    if (r > c.stopping.t_max + c.data.R + 2 * c.grid.dr) beyond = std::max(beyond, u);
  }
  EXPECT_LT(beyond, 1e-4 * sup);

  SimConfig fine = c;
  fine.grid.dr = c.grid.dr / 2;
  EXPECT_LT(run(fine).max_front_excess, run(c).max_front_excess);
}

// --- functionals -------------------------------------------------------------------------

TEST(Functionals, InitialValues) {
  for (int n : {1, 2, 3}) {
    SimConfig c = smooth_config();
    c.model.n = n;
    c.stopping.t_max = 0.1;
    const auto r = run(c);
    EXPECT_NEAR(r.series[0].F0, c.eps * r.data.int_f, 1e-14);
    EXPECT_NEAR(r.series[0].F1, c.eps * r.data.int_f_phi1, 1e-13 * r.series[0].F1);
    EXPECT_NEAR(r.series[0].dF0, c.eps * r.data.int_g, 1e-14);
  }
}

TEST(Functionals, IntegralsMatchQuadrature) {
  // n = 3 bump: int f dx = 4 pi int_0^R f r^2 dr, checked against the n = 1 path on the same profile
  SimConfig c = smooth_config();
  c.model.n = 3;
  const auto g = make_grid(3, 0.001, 6000);
  const auto d = make_initial_data(c, g);
  double ref = 0.0;
  const int m = 20000;
  for (int k = 0; k < m; ++k) {
    const double r = (k + 0.5) / m;
    ref += 4.0 * std::numbers::pi * profile(c.data, r) * r * r / m;
  }
  EXPECT_NEAR(d.int_f, ref, 1e-6 * ref);
}

TEST(Functionals, F0ContinuityBound) {
  SimConfig c = smooth_config();
  const auto r = run(c);
  for (std::size_t k = 0; k + 1 < r.series.size(); ++k) {
    const auto& a = r.series[k];
    const auto& b = r.series[k + 1];
    const double dt = b.t - a.t;
    EXPECT_LE(std::abs(b.F0 - a.F0), 1.01 * dt * std::max(std::abs(a.dF0), std::abs(b.dF0)) + 1e-15);
  }
}

TEST(Functionals, F0StaysNonnegative) {
  for (int n : {1, 2, 3})
    for (double mu1 : {0.0, 1.0, 3.0}) {
      SimConfig c = smooth_config();
      c.model.n = n;
      c.model.mu1 = mu1;
      c.grid.dr = 0.02;
      const auto r = run(c);
      for (const auto& s : r.series) EXPECT_GE(s.F0, 0.0) << n << ' ' << mu1 << ' ' << s.t;
    }
}

// --- identities --------------------------------------------------------------------------

TEST(Identities, LMAtTimeZero) {
  const auto c = smooth_config();
  const auto r = run(c);
  const auto rep = verify_identities(r, c);
  EXPECT_NEAR(rep.L[0], r.series[0].F0, 1e-15);
  EXPECT_EQ(rep.M[0], 0.0);
  for (double m : rep.M) EXPECT_GE(m, 0.0);
}

TEST(Identities, FZeroEqualsLPlusMAtSecondOrder) {
  SimConfig c = smooth_config();
  c.grid.dr = 1.0 / 100;
  const auto cv = identity_convergence(c, 3);
  ASSERT_TRUE(cv.reports[1].lm_residual);
  EXPECT_LT(*cv.reports[1].lm_residual, 2e-2);  // dr = 1/200
  ASSERT_TRUE(cv.lm_order);
  EXPECT_GE(*cv.lm_order, 1.8);
  EXPECT_LT(cv.reports[1].f0_residual, 1e-3);
  EXPECT_LT(cv.reports[1].f1_residual, 1e-3);
  EXPECT_GE(cv.f1_order, 1.8);
}

TEST(Identities, LPositiveForHPositiveData) {
  const auto c = smooth_config();
  const auto rep = verify_identities(run(c), c);
  ASSERT_TRUE(rep.L_positive_after);
  EXPECT_LE(*rep.L_positive_after, c.stopping.t_max);
}

TEST(Identities, SkippedForNegativeDelta) {
  SimConfig c = smooth_config();
  c.model.mu2 = 1.0;
  c.data.data_class = DataClass::Custom;
  c.data.g_ratio = 1.0;
  const auto rep = verify_identities(run(c), c);
  EXPECT_FALSE(rep.lm_residual);
  EXPECT_LT(rep.f0_residual, 1e-3);
}

TEST(Identities, ScatteringComparison) {
  SimConfig c = smooth_config();
  c.model.kind = ModelKind::Scattering;
  c.model.nu1 = 1.0;
  c.model.nu2 = -0.5;
  c.model.beta = 2.0;
  c.grid.dr = 0.005;
  const auto rep = verify_identities(run(c), c);
  ASSERT_TRUE(rep.comparison_margin);
  EXPECT_GE(*rep.comparison_margin, 0.0);
  ASSERT_TRUE(rep.overG_residual);
  EXPECT_LT(*rep.overG_residual, 1e-3);
  EXPECT_LT(rep.f0_residual, 5e-3);
  EXPECT_LT(rep.f1_residual, 5e-3);
}

// --- blow-up detection ----------------------------------------------------------------

TEST(Blowup, OdeOracle) {
  for (double p : {2.0, 3.0})
    for (double u0 : {0.5, 1.0})
      for (double v0 : {0.0, 1.0}) {
        const auto r = run(ode_config(p, u0, v0));
        ASSERT_EQ(r.status, SimStatus::BlewUp);
        const double T = oracle::ode_blowup_time(p, u0, v0);
        EXPECT_LT(std::abs(*r.T_est / T - 1.0), 0.01) << p << ' ' << u0 << ' ' << v0;
        EXPECT_LT(r.threshold_sensitivity, 0.02);
      }
}

TEST(Blowup, LargeDataBlowsUpQuickly) {
  SimConfig c = smooth_config();
  c.model.mu1 = 0.0;
  c.eps = 1.0;
  c.grid.dr = 0.02;
  c.stopping.t_max = 10.0;
  c.grid.r_max = 12.0;
  const auto r = run(c);
  ASSERT_EQ(r.status, SimStatus::BlewUp);
  EXPECT_LT(*r.T_est, 10.0);
  EXPECT_GT(*r.T_est, r.series.front().t);
  EXPECT_LT(r.threshold_sensitivity, 0.02);
}

TEST(Blowup, ZeroDataReachesTmax) {
  SimConfig c = smooth_config();
  c.eps = 0.0;
  const auto r = run(c);
  EXPECT_EQ(r.status, SimStatus::ReachedTmax);
  EXPECT_FALSE(r.T_est);
}

TEST(Run, Deterministic) {
  SimConfig c = smooth_config();
  c.grid.dr = 0.02;
  const auto a = run(c), b = run(c);
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t k = 0; k < a.series.size(); ++k) {
    EXPECT_EQ(a.series[k].t, b.series[k].t);
    EXPECT_EQ(a.series[k].F0, b.series[k].F0);
    EXPECT_EQ(a.series[k].F1, b.series[k].F1);
    EXPECT_EQ(a.series[k].sup, b.series[k].sup);
  }
}

TEST(Run, SeriesIncreasingAndCsv) {
  SimConfig c = smooth_config();
  c.grid.dr = 0.02;
  c.stopping.sample_stride = 7;
  const auto r = run(c);
  for (std::size_t k = 1; k < r.series.size(); ++k) EXPECT_GT(r.series[k].t, r.series[k - 1].t);
  EXPECT_DOUBLE_EQ(r.series.back().t, c.stopping.t_max);
  std::ostringstream out;
  write_series_csv(out, r);
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "t,F0,F1,supnorm");
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), r.series.size() + 1);
}
