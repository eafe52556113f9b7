#pragma once

// Extremal functional for the iteration lemma: the solution of
//
//   F(t) = E A t^a ln(1+t)^c + B int_{t0}^t ds int_{t0}^s r^{-b} F(r)^p dr,
//
// which meets both hypotheses with equality, and a checker that replays the
// lemma's ansatz bounds on a sampled F.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "blowuplab/errors.hpp"
#include "blowuplab/kato.hpp"

namespace blowuplab {

struct GridFunction {
  std::vector<double> t;
  std::vector<double> F;
};

struct ExtremalOptions {
  double eta = 0.05;        // step as a fraction of min(t, growth time scale)
  double cap = 1e12;        // blow-up declared when F > cap * F(t0)
  double t_max = 1e12;
  double fp_tol = 1e-10;    // fixed-point relative tolerance per step
  int fp_max_iter = 200;
  long max_steps = 5'000'000;
};

struct ExtremalResult {
  GridFunction F;
  bool blew_up = false;
  double blowup_time = 0.0;  // crossing of cap * F(t0), interpolated in log F
};

inline double kato_source(const KatoInput& in, double t) {
  double s = in.E * in.A * std::pow(t, in.a);
  if (in.c != 0.0) s *= std::pow(std::log1p(t), in.c);
  return s;
}

namespace detail {

/// State of the nested trapezoid at one grid point.
struct VolterraNode {
  double t, F, g, G, Q;  // g = t^{-b} F^p, G = int g, Q = int G
};

/// Solves F = S(t1) + B [Q0 + h/2 (G0 + G0 + h/2 (g0 + t1^{-b} F^p))] by fixed point.
inline std::optional<VolterraNode> volterra_step(const KatoInput& in, const VolterraNode& n0,
                                                 double t1, const ExtremalOptions& opt) {
  const double h = t1 - n0.t;
  const double S1 = kato_source(in, t1);
  const double w = std::pow(t1, -in.b);
  const double base = S1 + in.B * (n0.Q + h * n0.G + h * h / 4.0 * n0.g);
  const double coef = in.B * h * h / 4.0 * w;
  double F = std::max(n0.F, base);
  for (int it = 0; it < opt.fp_max_iter; ++it) {
    const double next = base + coef * std::pow(F, in.p);
    if (!std::isfinite(next)) return std::nullopt;
    const bool done = std::abs(next - F) <= opt.fp_tol * std::abs(next);
    F = next;
    if (done) {
      const double g1 = w * std::pow(F, in.p);
      const double G1 = n0.G + h / 2.0 * (n0.g + g1);
      const double Q1 = n0.Q + h / 2.0 * (n0.G + G1);
      return VolterraNode{t1, F, g1, G1, Q1};
    }
  }
  return std::nullopt;
}

inline double log_crossing(double t0, double F0, double t1, double F1, double level) {
  const double l0 = std::log(F0), l1 = std::log(F1), ll = std::log(level);
  if (l1 == l0) return t1;
  return t0 + (t1 - t0) * (ll - l0) / (l1 - l0);
}

}  // namespace detail

/// Marches on the given grid (grid[0] >= max(T0, 1)); stops after the cap is crossed.
inline ExtremalResult synthesize_extremal(const KatoInput& in, const std::vector<double>& grid,
                                          const ExtremalOptions& opt = {}) {
  in.validate();
  if (grid.size() < 2) throw validation_error("grid needs at least two points");
  if (grid[0] < std::max(in.T0, 1.0)) throw validation_error("grid must start at max(T0, 1)");
  ExtremalResult r;
  detail::VolterraNode node{grid[0], kato_source(in, grid[0]), 0.0, 0.0, 0.0};
  node.g = std::pow(node.t, -in.b) * std::pow(node.F, in.p);
  const double level = opt.cap * node.F;
  r.F.t.push_back(node.t);
  r.F.F.push_back(node.F);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw validation_error("grid must be strictly increasing");
    const auto next = detail::volterra_step(in, node, grid[i], opt);
    if (!next) throw numerical_failure("fixed point did not converge at t = " + std::to_string(grid[i]));
    r.F.t.push_back(next->t);
    r.F.F.push_back(next->F);
    if (next->F > level) {
      r.blew_up = true;
      r.blowup_time = detail::log_crossing(node.t, node.F, next->t, next->F, level);
      break;
    }
    node = *next;
  }
  return r;
}

/// Adaptive march with h = eta * min(t, tau), tau = sqrt(F / (B t^{-b} F^p)).
inline ExtremalResult synthesize_extremal(const KatoInput& in, const ExtremalOptions& opt = {}) {
  in.validate();
  if (!(kato_gamma(in.p, in.a, in.b) > 0)) throw validation_error("synthesize_extremal needs gamma > 0");
  if (!(opt.eta > 0) || !(opt.cap > 1)) throw validation_error("eta > 0 and cap > 1 required");
  ExtremalResult r;
  const double t0 = std::max(in.T0, 1.0);
  detail::VolterraNode node{t0, kato_source(in, t0), 0.0, 0.0, 0.0};
  node.g = std::pow(t0, -in.b) * std::pow(node.F, in.p);
  const double level = opt.cap * node.F;
  r.F.t.push_back(node.t);
  r.F.F.push_back(node.F);
  for (long step = 0; step < opt.max_steps && node.t < opt.t_max; ++step) {
    const double tau = std::sqrt(node.F / (in.B * node.g));
    double h = opt.eta * std::min(node.t, tau);
    std::optional<detail::VolterraNode> next;
    for (int tries = 0; tries < 40 && !next; ++tries, h /= 2) next = detail::volterra_step(in, node, node.t + h, opt);
    if (!next) throw numerical_failure("fixed point did not converge at t = " + std::to_string(node.t));
    r.F.t.push_back(next->t);
    r.F.F.push_back(next->F);
    if (next->F > level) {
      r.blew_up = true;
      r.blowup_time = detail::log_crossing(node.t, node.F, next->t, next->F, level);
      return r;
    }
    node = *next;
  }
  return r;
}

struct RefinedBlowup {
  double time = 0.0;
  double eta = 0.0;            // step fraction of the accepted run
  int refinements = 0;
  double last_change = 0.0;    // relative change at the last halving
  double cap_sensitivity = 0.0;  // |T(cap 1e6) - T(cap 1e12)| / T(cap 1e12) at the final eta
};

/// Halves eta until the blow-up time moves by less than `rel_tol`.
inline RefinedBlowup refined_blowup_time(const KatoInput& in, ExtremalOptions opt = {},
                                         double rel_tol = 0.01, int max_refinements = 12) {
  auto run = [&](const ExtremalOptions& o) {
    const auto res = synthesize_extremal(in, o);
    if (!res.blew_up) throw numerical_failure("extremal did not blow up before t_max");
    return res.blowup_time;
  };
  RefinedBlowup out;
  double prev = run(opt);
  for (int k = 1; k <= max_refinements; ++k) {
    opt.eta /= 2;
    const double cur = run(opt);
    out.last_change = std::abs(cur - prev) / cur;
    prev = cur;
    out.refinements = k;
    if (out.last_change < rel_tol) break;
  }
  if (!(out.last_change < rel_tol)) throw numerical_failure("blow-up time did not settle under refinement");
  out.time = prev;
  out.eta = opt.eta;
  ExtremalOptions low = opt;
  low.cap = 1e6;
  ExtremalOptions high = opt;
  high.cap = 1e12;
  const double th = run(high);
  out.cap_sensitivity = std::abs(run(low) - th) / th;
  return out;
}

// --- certificate ---------------------------------------------------------------

struct AnsatzMargin {
  int j = 0;
  double min_margin = 0.0;     // min over grid points t > T~ of ln F - ln(ansatz)
  double log_bound_at_tstar = 0.0;
};

struct Certificate {
  bool accepted = false;
  std::string reason;
  std::optional<double> violation_t;
  double T_tilde = 0.0;
  double C_amp = 0.0;
  double t_star = 0.0;         // C_amp * T~
  double log_M = 0.0;
  int j_diverge = 0;           // first j with ln(ansatz at t_star) > ln M, 0 if none
  std::vector<AnsatzMargin> margins;
};

/// Replays the lemma on a sampled F: checks both hypotheses by trapezoid
/// quadrature, the ansatz bound for every j the trace reaches, and that the
/// bound at C_amp * T~ exceeds M for some j.
inline Certificate certify_divergence(const GridFunction& F, const KatoInput& in,
                                      double hyp_tol = 1e-6, double M = 1e300, int j_max = 64) {
  in.validate();
  if (F.t.size() != F.F.size() || F.t.size() < 2) throw validation_error("bad grid function");
  Certificate cert;
  cert.log_M = std::log(M);

  double G = 0.0, Q = 0.0;
  double g_prev = std::pow(F.t[0], -in.b) * std::pow(F.F[0], in.p);
  for (std::size_t i = 0; i < F.t.size(); ++i) {
    const double t = F.t[i];
    if (i > 0) {
      const double h = t - F.t[i - 1];
      const double g = std::pow(t, -in.b) * std::pow(F.F[i], in.p);
      const double G_new = G + h / 2.0 * (g_prev + g);
      Q += h / 2.0 * (G + G_new);
      G = G_new;
      g_prev = g;
    }
    const double S = kato_source(in, t);
    if (F.F[i] < S * (1.0 - hyp_tol)) {
      cert.reason = "hp1 violated: F < E A t^a ln(1+t)^c";
      cert.violation_t = t;
      return cert;
    }
    if (F.F[i] < in.B * Q * (1.0 - hyp_tol)) {
      cert.reason = "hp2 violated: F < B int int r^-b F^p";
      cert.violation_t = t;
      return cert;
    }
  }

  const auto d = amplification_constant(in);
  cert.T_tilde = d.T_tilde;
  cert.C_amp = d.C_amp;
  cert.t_star = d.C_amp * d.T_tilde;
  if (d.T_tilde < F.t.front()) {
    cert.reason = "T~ precedes the start of the grid";
    return cert;
  }
  const auto tr = iterate(in, j_max);
  bool ansatz_ok = true;
  for (int j = 1; j <= tr.j_max; ++j) {
    AnsatzMargin m{j, kInf, log_ansatz(tr, j, d.T_tilde, cert.t_star)};
    for (std::size_t i = 0; i < F.t.size(); ++i) {
      if (!(F.t[i] > d.T_tilde)) continue;
      const double lb = log_ansatz(tr, j, d.T_tilde, F.t[i]);
      const double margin = std::log(F.F[i]) - lb;
      m.min_margin = std::min(m.min_margin, margin);
      if (margin < -hyp_tol * std::max(1.0, std::abs(lb)) && ansatz_ok) {
        ansatz_ok = false;
        cert.violation_t = F.t[i];
        cert.reason = "ansatz bound violated at j = " + std::to_string(j);
      }
    }
    if (cert.j_diverge == 0 && m.log_bound_at_tstar > cert.log_M) cert.j_diverge = j;
    cert.margins.push_back(m);
  }
  if (!ansatz_ok) return cert;
  if (cert.j_diverge == 0) {
    cert.reason = "ansatz bound at C*T~ did not exceed M within the trace";
    return cert;
  }
  cert.accepted = true;
  cert.reason = "ok";
  return cert;
}

}  // namespace blowuplab
