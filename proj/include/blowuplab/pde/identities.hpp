#pragma once

// Residuals of the functional identities along a recorded run:
//
//   F0'' + a F0' + b F0 = int |u|^p                         (second differences)
//   F0 = L + M   with kappa, lambda from delta              (scale-invariant, delta >= 0)
//   F1'' + (2 + a) F1' + (a + b) F1 = int |u|^p psi_1
//
// and, for scattering damping, the comparison functional G0bar built from the
// same L + M formula with mu1 = 0, mu2 = m(0) nu2.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "blowuplab/errors.hpp"
#include "blowuplab/pde/config.hpp"
#include "blowuplab/pde/solver.hpp"

namespace blowuplab::pde {

struct IdentityReport {
  double f0_residual = 0.0;                 // relative sup norm
  std::optional<double> lm_residual;         // max |F0 - L - M| / max |F0|
  double f1_residual = 0.0;                 // relative sup norm
  std::optional<double> L_positive_after;    // L > 0 on every sample from here on
  std::optional<double> overG_residual;      // scattering: G0bar'' + m0 nu2/(1+t)^2 G0bar - m0 src
  std::optional<double> comparison_margin;   // scattering: min (G0 - G0bar)
  std::vector<double> L, M;                  // per sample (scale-invariant) or G0bar (scattering, in L)
};

namespace detail {

/// int_0^t (1+s)^{-lambda} ds.
inline double power_integral(double lambda, double t) {
  if (std::abs(lambda - 1.0) < 1e-14) return std::log1p(t);
  return (std::pow(1.0 + t, 1.0 - lambda) - 1.0) / (1.0 - lambda);
}

/// L and M of F'' + mu1/(1+t) F' + mu2/(1+t)^2 F = scale * src on the sample times.
inline void lm_split(double mu1, double mu2, double F0, double dF0, const std::vector<double>& t,
                     const std::vector<double>& src, double scale, std::vector<double>& L, std::vector<double>& M) {
  const double sd = std::sqrt(std::max(discriminant(mu1, mu2), 0.0));
  const double lambda = 1.0 + sd, kappa = (mu1 - 1.0 - sd) / 2.0;
  const std::size_t K = t.size();
  L.assign(K, 0.0);
  M.assign(K, 0.0);
  double Q = 0.0, outer = 0.0;
  double q_prev = scale * src[0];
  double o_prev = 0.0;  // (1+s)^{-lambda} Q(s) at s = 0
  for (std::size_t k = 0; k < K; ++k) {
    if (k > 0) {
      const double h = t[k] - t[k - 1];
      const double q = std::pow(1.0 + t[k], kappa + lambda) * scale * src[k];
      Q += h / 2.0 * (q_prev + q);
      q_prev = q;
      const double o = std::pow(1.0 + t[k], -lambda) * Q;
      outer += h / 2.0 * (o_prev + o);
      o_prev = o;
    }
    const double damp = std::pow(1.0 + t[k], -kappa);
    L[k] = F0 * damp + (kappa * F0 + dF0) * damp * power_integral(lambda, t[k]);
    M[k] = damp * outer;
  }
}

/// Three-point second derivative on a possibly non-uniform grid.
inline double second_difference(const std::vector<double>& t, const std::vector<double>& y, std::size_t k) {
  const double h1 = t[k] - t[k - 1], h2 = t[k + 1] - t[k];
  return 2.0 * ((y[k + 1] - y[k]) / h2 - (y[k] - y[k - 1]) / h1) / (h1 + h2);
}

/// max |y'' + A y' + B y - S| / max(|y''| + |A y'| + |B y| + |S|) over interior samples.
template <class Coefs>
double ode_residual(const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& dy,
                    const std::vector<double>& S, Coefs coefs) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const auto [A, B] = coefs(t[k]);
    const double d2 = second_difference(t, y, k);
    num = std::max(num, std::abs(d2 + A * dy[k] + B * y[k] - S[k]));
    den = std::max(den, std::abs(d2) + std::abs(A * dy[k]) + std::abs(B * y[k]) + std::abs(S[k]));
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace detail

/// Needs at least three samples; blow-up runs are checked on their recorded prefix.
inline IdentityReport verify_identities(const SimResult& r, const SimConfig& c) {
  if (r.series.size() < 3) throw validation_error("identity check needs at least three samples");
  const auto& s = r.series;
  const std::size_t K = s.size();
  std::vector<double> t(K), F0(K), dF0(K), F1(K), dF1(K), src(K), srcpsi(K);
  for (std::size_t k = 0; k < K; ++k) {
    t[k] = s[k].t;
    F0[k] = s[k].F0;
    dF0[k] = s[k].dF0;
    F1[k] = s[k].F1;
    dF1[k] = s[k].dF1;
    src[k] = s[k].src;
    srcpsi[k] = s[k].src_psi;
  }
  const auto& m = c.model;
  IdentityReport rep;
  rep.f0_residual = detail::ode_residual(t, F0, dF0, src, [&](double x) { return std::pair{m.damping(x), m.mass(x)}; });
  rep.f1_residual = detail::ode_residual(t, F1, dF1, srcpsi, [&](double x) {
    const double a = m.damping(x);
    return std::pair{2.0 + a, a + m.mass(x)};
  });

  if (m.kind == ModelKind::ScaleInvariant) {
    if (m.delta() < -kDeltaTolerance) return rep;  // kappa, lambda undefined
    detail::lm_split(m.mu1, m.mu2, F0[0], dF0[0], t, src, 1.0, rep.L, rep.M);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      num = std::max(num, std::abs(F0[k] - rep.L[k] - rep.M[k]));
      den = std::max(den, std::abs(F0[k]));
    }
    rep.lm_residual = den > 0 ? num / den : 0.0;
    for (std::size_t k = K; k-- > 0;) {
      if (!(rep.L[k] > 0)) break;
      rep.L_positive_after = t[k];
    }
    return rep;
  }

  // scattering: G0bar solves the massless comparison problem, written in its L + M form
  const double m0 = m.scattering().multiplier_at_zero();
  detail::lm_split(0.0, m0 * m.nu2, F0[0] / 2.0, m0 * dF0[0] / 2.0, t, src, m0, rep.L, rep.M);
  std::vector<double> G(K), dG(K), S(K);
  double margin = kInf;
  for (std::size_t k = 0; k < K; ++k) {
    G[k] = rep.L[k] + rep.M[k];
    S[k] = m0 * src[k];
    margin = std::min(margin, F0[k] - G[k]);
  }
  // G0bar has no first-order term, so its derivative is never needed
  rep.overG_residual = detail::ode_residual(t, G, dG, S, [&](double x) { return std::pair{0.0, m0 * m.nu2 / ((1 + x) * (1 + x))}; });
  rep.comparison_margin = margin;
  return rep;
}

struct ConvergenceReport {
  std::vector<double> dr;
  std::vector<IdentityReport> reports;
  std::optional<double> lm_order;  // log2 of successive residual ratios, last pair
  double f0_order = 0.0;
  double f1_order = 0.0;
};

/// Runs `c` at dr, dr/2, ..., halving dt with dr through the CFL number.
inline ConvergenceReport identity_convergence(const SimConfig& c, int levels = 3) {
  if (levels < 2) throw validation_error("need at least two refinement levels");
  ConvergenceReport out;
  SimConfig k = c;
  for (int l = 0; l < levels; ++l) {
    const auto res = run(k);
    out.dr.push_back(k.grid.dr);
    out.reports.push_back(verify_identities(res, k));
    k.grid.dr /= 2.0;
  }
  const auto& a = out.reports[levels - 2];
  const auto& b = out.reports[levels - 1];
  if (a.lm_residual && b.lm_residual && *b.lm_residual > 0) out.lm_order = std::log2(*a.lm_residual / *b.lm_residual);
  if (b.f0_residual > 0) out.f0_order = std::log2(a.f0_residual / b.f0_residual);
  if (b.f1_residual > 0) out.f1_order = std::log2(a.f1_residual / b.f1_residual);
  return out;
}

}  // namespace blowuplab::pde
