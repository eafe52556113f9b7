#pragma once

// Branch selection and lifespan laws for the blow-up theorems.
//
//   classify_thm1     h > 0 data, general (mu1, mu2) with delta >= 0
//   classify_cor1     massless case, mu2 = 0
//   classify_cor2     massless case, h = 0 data
//   classify_h0       h = 0 data, general (mu1, mu2)
//   classify_negmass  scattering damping with negative mass

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/lifespan.hpp"

namespace blowuplab {

enum class Branch { SubWave, Transition, SubHeat, Improved1D, PStar, Mixed, NoBlowup };

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::SubWave: return "SubWave";
    case Branch::Transition: return "Transition";
    case Branch::SubHeat: return "SubHeat";
    case Branch::Improved1D: return "Improved1D";
    case Branch::PStar: return "PStar";
    case Branch::Mixed: return "Mixed";
    case Branch::NoBlowup: return "NoBlowup";
  }
  return "?";
}

inline Branch branch_from_string(std::string_view s) {
  for (auto b : {Branch::SubWave, Branch::Transition, Branch::SubHeat, Branch::Improved1D,
                 Branch::PStar, Branch::Mixed, Branch::NoBlowup})
    if (to_string(b) == s) return b;
  throw validation_error("unknown branch: " + std::string(s));
}

struct Regime {
  bool blows_up = false;
  double p_crit = kInf;
  Branch branch = Branch::NoBlowup;
  std::optional<LifespanLaw> law;
  double q = 0.0;

  friend bool operator==(const Regime&, const Regime&) = default;
};

// --- law builders -----------------------------------------------------------

/// eps^{-2p(p-1)/gamma_S(p, nu)}.
inline LifespanLaw wave_law(double p, double nu) {
  return {1.0, gamma_strauss(p, nu) / (2.0 * p * (p - 1.0)), 0.0, LawTag::WaveLike};
}

/// eps * T^{gamma_F(p, nu)/(p-1)} * ln(1+T)^c = 1.
inline LifespanLaw heat_law(double p, double nu, double log_power) {
  return {1.0, gamma_fujita(p, nu) / (p - 1.0), log_power,
          log_power == 0.0 ? LawTag::HeatLike : LawTag::LogImproved};
}

/// eps^p * T^{gamma_F(p, nu)/(p-1)} * ln(1+T)^c = 1.
inline LifespanLaw mixed_law(double p, double nu, double log_power) {
  return {p, gamma_fujita(p, nu) / (p - 1.0), log_power,
          log_power == 0.0 ? LawTag::MixedType : LawTag::LogImproved};
}

/// q = kappa - (n + mu1 - 1) p / 2 + n + 1.
inline double q_exponent(int n, double mu1, double kappa, double p) {
  return kappa - (n + mu1 - 1.0) * p / 2.0 + n + 1.0;
}

namespace detail {

inline void require_p(double p) {
  if (!(p > 1) || !std::isfinite(p)) throw validation_error("p must be a finite real > 1");
}

inline Regime no_blowup(double p_crit, double q) {
  return Regime{false, p_crit, Branch::NoBlowup, std::nullopt, q};
}

inline Regime with_law(double p_crit, Branch b, LifespanLaw law, double q) {
  return Regime{true, p_crit, b, law, q};
}

/// Heat branch label: Transition exactly on the curve, SubHeat below it.
inline Branch heat_label(double p, double transition) {
  return on_curve(p, transition) ? Branch::Transition : Branch::SubHeat;
}

}  // namespace detail

// --- classifiers ------------------------------------------------------------

inline Regime classify_thm1(int n, double mu1, double mu2, double p, bool h_positive = true) {
  ModelParams{n, mu1, mu2}.validate();
  detail::require_p(p);
  if (!h_positive)
    throw validation_error("classify_thm1 covers the h > 0 data class; use classify_h0");
  const double delta = discriminant(mu1, mu2);
  const double sd = require_sqrt_delta(delta);
  const double kappa = (mu1 - 1.0 - sd) / 2.0;
  const double p_crit = critical_exponent_thm1(n, mu1, delta);
  const double q = q_exponent(n, mu1, kappa, p);
  if (!(p < p_crit)) return detail::no_blowup(p_crit, q);

  const double c = 1.0 - sign_delta(delta);
  const double d_star = critical_offset(n + mu1);
  const auto wave = [&] { return detail::with_law(p_crit, Branch::SubWave, wave_law(p, n + mu1), q); };

  if (sd <= n - 2.0) return wave();
  if (sd < n - d_star) {
    const double pt = transition_exponent(n, sd);
    if (p <= pt || on_curve(p, pt))
      return detail::with_law(p_crit, detail::heat_label(p, pt), heat_law(p, n + kappa, c), q);
    return wave();
  }
  return detail::with_law(p_crit, Branch::SubHeat, heat_law(p, n + kappa, c), q);
}

inline Regime classify_cor1(int n, double mu, double p) {
  if (n < 1) throw validation_error("dimension n must be >= 1");
  if (!(mu >= 0) || !std::isfinite(mu)) throw validation_error("mu must be finite and >= 0");
  detail::require_p(p);
  const double p_crit = critical_exponent_massless(n, mu);
  const double kappa = -negative_part(mu - 1.0);
  const double q = q_exponent(n, mu, kappa, p);
  if (!(p < p_crit)) return detail::no_blowup(p_crit, q);

  const double nu_heat = n - negative_part(mu - 1.0);
  // Logarithmic gain at mu = 1 exactly; the heat branch then only exists for n = 1, p <= 2.
  const double c = 1.0 - sign_delta((mu - 1.0) * (mu - 1.0));

  if (mu < mu_star(n)) {
    const double pt = transition_exponent(n, std::abs(mu - 1.0));
    if (p <= pt || on_curve(p, pt))
      return detail::with_law(p_crit, detail::heat_label(p, pt), heat_law(p, nu_heat, c), q);
    return detail::with_law(p_crit, Branch::SubWave, wave_law(p, n + mu), q);
  }
  return detail::with_law(p_crit, Branch::SubHeat, heat_law(p, n, 0.0), q);
}

inline Regime classify_cor2(int n, double mu, double p) {
  if (n < 1) throw validation_error("dimension n must be >= 1");
  if (!(mu >= 0) || !std::isfinite(mu)) throw validation_error("mu must be finite and >= 0");
  detail::require_p(p);
  const double p_crit = critical_exponent_massless(n, mu);
  const double kappa = -negative_part(mu - 1.0);
  const double q = q_exponent(n, mu, kappa, p);
  if (!(p < p_crit)) return detail::no_blowup(p_crit, q);

  if (n == 1 && mu > 0 && mu < 2 && p < 2.0 / (1.0 + std::abs(mu - 1.0)))
    return detail::with_law(p_crit, Branch::Improved1D,
                            heat_law(p, 1.0 + positive_part(mu - 1.0), 0.0), q);

  const auto wave = [&] { return detail::with_law(p_crit, Branch::SubWave, wave_law(p, n + mu), q); };
  const auto mixed = [&] { return detail::with_law(p_crit, Branch::Mixed, mixed_law(p, n, 0.0), q); };

  if (mu <= mu_star(n)) return wave();
  if (mu < n + 3.0) {
    const double ps = 1.0 + (n - mu + 3.0) / (n + mu - 1.0);
    if (on_curve(p, ps))
      return detail::with_law(p_crit, Branch::PStar,
                              LifespanLaw{p, 2.0 / (p - 1.0) - n, 1.0, LawTag::LogImproved}, q);
    return p < ps ? wave() : mixed();
  }
  return mixed();
}

inline Regime classify_h0(int n, double mu1, double mu2, double p) {
  ModelParams{n, mu1, mu2}.validate();
  if (!(mu1 >= 0)) throw validation_error("mu1 must be >= 0");
  detail::require_p(p);
  const double delta = discriminant(mu1, mu2);
  const double sd = require_sqrt_delta(delta);
  const double kappa = (mu1 - 1.0 - sd) / 2.0;
  const double p_crit = critical_exponent_thm1(n, mu1, delta);
  const double q = q_exponent(n, mu1, kappa, p);
  if (!(p < p_crit)) return detail::no_blowup(p_crit, q);

  const int sg = sign_delta(delta);
  if (n == 1 && sd < 1.0 && p < r_star(mu1, sd))
    return detail::with_law(p_crit, Branch::Improved1D,
                            heat_law(p, (mu1 + 1.0 + sd) / 2.0, 0.0), q);

  const auto wave = [&] { return detail::with_law(p_crit, Branch::SubWave, wave_law(p, n + mu1), q); };
  const auto sigma = [&] {
    return detail::with_law(p_crit, Branch::Mixed, mixed_law(p, n + kappa, 1.0 - sg), q);
  };

  if (sd <= n - critical_offset(n + mu1)) return wave();
  if (sd < n + 2.0) {
    const double ps = p_star(n, mu1, sd);
    if (on_curve(p, ps))
      return detail::with_law(p_crit, Branch::PStar, mixed_law(p, n + kappa, 2.0 - sg), q);
    return p < ps ? wave() : sigma();
  }
  return sigma();
}

/// Scattering damping with negative mass. Uses d_*(n),
/// gamma_F(p, n - (1 + sqrt(delta))/2) and gamma_S(p, n).
inline Regime classify_negmass(const ScatteringParams& params, double p) {
  params.validate();
  detail::require_p(p);
  const int n = params.n;
  const double delta = params.delta();
  const double sd = std::sqrt(delta);
  const double nu_heat = n - (1.0 + sd) / 2.0;
  const double p_crit = std::max(fujita_exponent(nu_heat), strauss_exponent(n));
  const double q = q_exponent(n, 0.0, -(1.0 + sd) / 2.0, p);
  if (!(p < p_crit)) return detail::no_blowup(p_crit, q);

  const auto wave = [&] { return detail::with_law(p_crit, Branch::SubWave, wave_law(p, n), q); };
  const auto heat = [&](Branch b) { return detail::with_law(p_crit, b, heat_law(p, nu_heat, 0.0), q); };

  if (sd <= n - 2.0) return wave();
  if (sd < n - critical_offset(n)) {
    const double pt = transition_exponent(n, sd);
    if (p <= pt || on_curve(p, pt)) return heat(detail::heat_label(p, pt));
    return wave();
  }
  return heat(Branch::SubHeat);
}

inline Regime classify_negmass(int n, double nu1, double nu2, double beta, double p) {
  return classify_negmass(ScatteringParams{n, nu1, nu2, beta}, p);
}

}  // namespace blowuplab
