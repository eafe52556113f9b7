#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "blowuplab/errors.hpp"

namespace blowuplab {

enum class LawTag { WaveLike, HeatLike, MixedType, LogImproved };

inline std::string_view to_string(LawTag tag) {
  switch (tag) {
    case LawTag::WaveLike: return "WaveLike";
    case LawTag::HeatLike: return "HeatLike";
    case LawTag::MixedType: return "MixedType";
    case LawTag::LogImproved: return "LogImproved";
  }
  return "?";
}

inline LawTag law_tag_from_string(std::string_view s) {
  for (auto t : {LawTag::WaveLike, LawTag::HeatLike, LawTag::MixedType, LawTag::LogImproved})
    if (to_string(t) == s) return t;
  throw validation_error("unknown law tag: " + std::string(s));
}

/// Implicit lifespan equation  eps^eps_power * T^t_exponent * ln(1+T)^log_power = 1.
struct LifespanLaw {
  double eps_power = 1.0;
  double t_exponent = 1.0;
  double log_power = 0.0;
  LawTag tag = LawTag::HeatLike;

  /// Power of 1/eps in the pure-power part: T ~ eps^{-exponent()}.
  double exponent() const { return eps_power / t_exponent; }

  /// log of the left-hand side; zero on the solution.
  double log_lhs(double eps, double T) const {
    double v = eps_power * std::log(eps) + t_exponent * std::log(T);
    if (log_power != 0.0) v += log_power * std::log(std::log1p(T));
    return v;
  }

  double residual(double eps, double T) const { return std::expm1(log_lhs(eps, T)); }

  void validate() const {
    if (!(eps_power > 0) || !(t_exponent > 0) || !(log_power >= 0) ||
        !std::isfinite(eps_power) || !std::isfinite(t_exponent) || !std::isfinite(log_power))
      throw validation_error("lifespan law needs eps_power > 0, t_exponent > 0, log_power >= 0");
  }

  friend bool operator==(const LifespanLaw&, const LifespanLaw&) = default;
};

/// Solves the law for T. Pure power laws use the closed form eps^{-a/b};
/// logarithmic laws are bracketed on T in [1, 1e300] in log-space.
inline double solve_lifespan(const LifespanLaw& law, double eps) {
  law.validate();
  if (!(eps > 0) || !(eps < 1)) throw validation_error("eps must lie in (0, 1)");
  if (law.log_power == 0.0) return std::pow(eps, -law.exponent());

  auto g = [&](double u) {
    return law.eps_power * std::log(eps) + law.t_exponent * u +
           law.log_power * std::log(std::log1p(std::exp(u)));
  };
  const double lo = 0.0;
  const double hi = std::log(1e300);
  const double glo = g(lo);
  const double ghi = g(hi);
  if (glo > 0 || ghi < 0)
    throw numerical_failure("solve_lifespan: no bracket for T in [1, 1e300]");
  if (glo == 0) return 1.0;

  std::uintmax_t max_iter = 500;
  const auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits);
  auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, max_iter);
  double u = std::abs(g(a)) < std::abs(g(b)) ? a : b;
  // Newton polish in u; g is smooth and increasing.
  for (int k = 0; k < 3; ++k) {
    const double eu = std::exp(u);
    const double dg = law.t_exponent + law.log_power * eu / ((1.0 + eu) * std::log1p(eu));
    const double step = g(u) / dg;
    if (!std::isfinite(step)) break;
    u -= step;
  }
  return std::exp(u);
}

}  // namespace blowuplab
