#pragma once

// Critical exponents and derived scales for
//
//   u_tt - Δu + mu1/(1+t) u_t + mu2/(1+t)^2 u = |u|^p
//
// and for the scattering model with damping nu1/(1+t)^beta and negative mass.
// Extended reals are plain doubles; +infinity is represented by
// std::numeric_limits<double>::infinity() and never by a large sentinel.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "blowuplab/errors.hpp"

namespace blowuplab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute tolerance used when deciding whether delta is zero.
inline constexpr double kDeltaTolerance = 1e-12;

/// Relative tolerance used to decide that p sits exactly on a curve
/// (transition line, p_*, r_*, theta).
inline constexpr double kCurveTolerance = 1e-12;

inline double positive_part(double x) { return (std::abs(x) + x) / 2.0; }
inline double negative_part(double x) { return (std::abs(x) - x) / 2.0; }

/// sgn with a dead zone of width kDeltaTolerance around zero.
inline int sign_delta(double delta) {
  if (std::abs(delta) <= kDeltaTolerance) return 0;
  return delta > 0 ? 1 : -1;
}

inline bool on_curve(double p, double curve) {
  return std::isfinite(curve) &&
         std::abs(p - curve) <= kCurveTolerance * std::max(1.0, std::abs(curve));
}

// --- Fujita / Strauss -------------------------------------------------------

/// p_F(nu) = 1 + 2/nu for nu > 0, +inf otherwise.
inline double fujita_exponent(double nu) {
  return nu > 0 ? 1.0 + 2.0 / nu : kInf;
}

/// Positive root of gamma_S(p, nu) = 0 for nu > 1, +inf otherwise.
inline double strauss_exponent(double nu) {
  if (!(nu > 1)) return kInf;
  return (nu + 1.0 + std::sqrt(nu * nu + 10.0 * nu - 7.0)) / (2.0 * (nu - 1.0));
}

/// gamma_F(p, nu) = 2 - nu (p - 1).
inline double gamma_fujita(double p, double nu) { return 2.0 - nu * (p - 1.0); }

/// gamma_S(p, nu) = 2 + (nu + 1) p - (nu - 1) p^2.
inline double gamma_strauss(double p, double nu) {
  return 2.0 + (nu + 1.0) * p - (nu - 1.0) * p * p;
}

/// d_*(nu), the value of sqrt(delta) offset where Strauss and shifted Fujita
/// exponents meet: sqrt(delta) = n - d_*(n + mu1).
inline double critical_offset(double nu) {
  if (!(nu > 1)) return 0.0;
  return 0.5 * (-1.0 - nu + std::sqrt(nu * nu + 10.0 * nu - 7.0));
}

/// mu_*(n) = (n^2 + n + 2) / (n + 2).
inline double mu_star(int n) {
  const double nn = n;
  return (nn * nn + nn + 2.0) / (nn + 2.0);
}

/// theta(mu1) = 1 + mu1/2 - sqrt(mu1^2 + 16)/2, always in (-1, 1).
inline double theta_threshold(double mu1) {
  return 1.0 + mu1 / 2.0 - 0.5 * std::sqrt(mu1 * mu1 + 16.0);
}

/// p_*(n + mu1, n - sqrt(delta)); +inf when n + mu1 == 1.
inline double p_star(int n, double mu1, double sqrt_delta) {
  const double denom = n + mu1 - 1.0;
  if (denom == 0.0) return kInf;
  return 1.0 + (n - sqrt_delta + 2.0) / denom;
}

/// r_*(mu1, delta), defined for the one-dimensional h = 0 improvement when
/// 0 <= delta < 1.
inline double r_star(double mu1, double sqrt_delta) {
  const double th = theta_threshold(mu1);
  if (on_curve(sqrt_delta, th)) return 2.0 / (1.0 + th);
  if (sqrt_delta < th) return 1.0 + 2.0 * (2.0 - sqrt_delta) / (1.0 + mu1 + sqrt_delta);
  return 2.0 / (1.0 + sqrt_delta);
}

/// Transition exponent 2/(n - s); +inf for a non-positive denominator.
inline double transition_exponent(int n, double s) {
  const double denom = n - s;
  return denom > 0 ? 2.0 / denom : kInf;
}

/// delta = (mu1 - 1)^2 - 4 mu2.
inline double discriminant(double mu1, double mu2) {
  return (mu1 - 1.0) * (mu1 - 1.0) - 4.0 * mu2;
}

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); equals 2 for n = 1.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

// --- parameters -------------------------------------------------------------

struct ModelParams {
  int n = 1;
  double mu1 = 0.0;
  double mu2 = 0.0;

  void validate() const {
    if (n < 1) throw validation_error("dimension n must be >= 1");
    if (!std::isfinite(mu1) || !std::isfinite(mu2))
      throw validation_error("mu1 and mu2 must be finite");
  }
  double delta() const { return discriminant(mu1, mu2); }
};

/// Scattering damping nu1/(1+t)^beta with mass nu2/(1+t)^2 (mass exponent fixed to 2).
struct ScatteringParams {
  int n = 1;
  double nu1 = 0.0;
  double nu2 = -1.0;
  double beta = 2.0;

  void validate() const {
    if (n < 1) throw validation_error("dimension n must be >= 1");
    if (!(nu1 >= 0) || !std::isfinite(nu1)) throw validation_error("nu1 must be >= 0");
    if (!(nu2 < 0) || !std::isfinite(nu2)) throw validation_error("nu2 must be < 0");
    if (!(beta > 1) || !std::isfinite(beta)) throw validation_error("beta must be > 1");
  }

  /// m(0) = exp(nu1/(1 - beta)), the value of the bounded multiplier at t = 0.
  double multiplier_at_zero() const { return std::exp(nu1 / (1.0 - beta)); }

  /// Effective massless-damping mass nu2 * m(0).
  double effective_mass() const { return nu2 * multiplier_at_zero(); }

  /// delta = 1 - 4 nu2 exp(nu1/(1 - beta)) > 1.
  double delta() const { return 1.0 - 4.0 * effective_mass(); }
};

struct DerivedScales {
  double delta = 0.0;
  std::optional<double> sqrt_delta;
  std::optional<double> kappa;
  std::optional<double> lambda;
  double d_star = 0.0;
  double mu_star = 0.0;
  double theta = 0.0;
  std::optional<double> p_star;
  std::optional<double> r_star;  // n == 1 and 0 <= delta < 1 only
};

inline DerivedScales derive_scales(const ModelParams& params) {
  params.validate();
  DerivedScales s;
  s.delta = params.delta();
  s.d_star = critical_offset(params.n + params.mu1);
  s.mu_star = mu_star(params.n);
  s.theta = theta_threshold(params.mu1);
  if (s.delta >= -kDeltaTolerance) {
    const double sd = std::sqrt(std::max(s.delta, 0.0));
    s.sqrt_delta = sd;
    s.lambda = 1.0 + sd;
    s.kappa = (params.mu1 - 1.0 - sd) / 2.0;
    s.p_star = p_star(params.n, params.mu1, sd);
    if (params.n == 1 && sd < 1.0) s.r_star = r_star(params.mu1, sd);
  }
  return s;
}

inline double require_sqrt_delta(double delta) {
  if (delta < -kDeltaTolerance)
    throw unsupported_regime("delta < 0 (Klein-Gordon regime) is not supported");
  return std::sqrt(std::max(delta, 0.0));
}

/// p_{mu1,delta}(n) = max{ p_F(n + (mu1 - 1 - sqrt(delta))/2), p_S(n + mu1) }.
inline double critical_exponent_thm1(int n, double mu1, double delta) {
  const double sd = require_sqrt_delta(delta);
  return std::max(fujita_exponent(n + (mu1 - 1.0 - sd) / 2.0), strauss_exponent(n + mu1));
}

/// p_mu(n) = max{ p_F(n - [mu - 1]_-), p_S(n + mu) } for the massless problem.
inline double critical_exponent_massless(int n, double mu) {
  return std::max(fujita_exponent(n - negative_part(mu - 1.0)), strauss_exponent(n + mu));
}

}  // namespace blowuplab
