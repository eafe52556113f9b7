#pragma once

// Modified Bessel functions I_nu and K_nu for real nu >= 0, z > 0.
//
// I: ascending series for z <= max(20, nu^2), Hankel asymptotic expansion
// beyond, truncated at its smallest term. K: trapezoid rule on
// e^z K_nu(z) = int_0^inf exp(-z (cosh t - 1)) cosh(nu t) dt, which converges
// geometrically in the step for every z > 0.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "blowuplab/errors.hpp"

namespace blowuplab {

inline constexpr double kBesselSeam = 20.0;

namespace detail {

inline void check_bessel_args(double nu, double z) {
  if (!(nu >= 0) || !std::isfinite(nu)) throw validation_error("Bessel order must be >= 0");
  if (!(z > 0) || !std::isfinite(z)) throw validation_error("Bessel argument must be > 0 (domain error)");
}

/// e^{-z} I_nu(z) by the ascending series, terms accumulated in log form.
inline double bessel_i_series_scaled(double nu, double z) {
  const double l2 = 2.0 * std::log(z / 2.0);
  double lt = nu * std::log(z / 2.0) - std::lgamma(nu + 1.0) - z;
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double term = std::exp(lt);
    sum += term;
    if (k > z && term <= 1e-17 * sum) break;
    lt += l2 - std::log(k + 1.0) - std::log(k + nu + 1.0);
  }
  return sum;
}

/// e^{-z} I_nu(z) from the large-argument expansion
/// (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k, stopped at the smallest term.
inline double bessel_i_asymptotic_scaled(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace detail

/// e^{-z} I_nu(z).
inline double bessel_i_scaled(double nu, double z) {
  detail::check_bessel_args(nu, z);
  if (z <= std::max(kBesselSeam, nu * nu)) return detail::bessel_i_series_scaled(nu, z);
  return detail::bessel_i_asymptotic_scaled(nu, z);
}

/// e^{z} K_nu(z).
inline double bessel_k_scaled(double nu, double z) {
  detail::check_bessel_args(nu, z);
  const double h = std::min(0.1, 0.6 / std::sqrt(z));
  auto f = [&](double t) { return std::exp(-z * (std::cosh(t) - 1.0) + nu * t) * 0.5 * (1.0 + std::exp(-2.0 * nu * t)); };
  // the integrand peaks at sinh t = nu / z
  const double t_peak = std::asinh(nu / z);
  double sum = 0.5 * f(0.0);
  for (int k = 1; k < 1000000; ++k) {
    const double t = k * h;
    const double v = f(t);
    sum += v;
    if (t > t_peak && v <= 1e-18 * sum) break;
  }
  return h * sum;
}

inline double bessel_I(double nu, double z) { return bessel_i_scaled(nu, z) * std::exp(z); }
inline double bessel_K(double nu, double z) { return bessel_k_scaled(nu, z) * std::exp(-z); }

/// I_nu'(z) = I_{nu+1}(z) + (nu/z) I_nu(z).
inline double bessel_I_prime(double nu, double z) { return bessel_I(nu + 1.0, z) + nu / z * bessel_I(nu, z); }

/// K_nu'(z) = -K_{nu+1}(z) + (nu/z) K_nu(z).
inline double bessel_K_prime(double nu, double z) { return -bessel_K(nu + 1.0, z) + nu / z * bessel_K(nu, z); }

}  // namespace blowuplab
