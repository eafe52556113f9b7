#pragma once

// Test functions and coefficients of the weighted functional F_1.
//
//   phi_1(x) = int_{S^{n-1}} e^{x.w} dS_w = (2 pi)^{n/2} r^{1-n/2} I_{n/2-1}(r),
//   psi_1(x, t) = e^{-t} phi_1(x),
//
// and the homogeneous solution B_0 = eps (c+ I_nu + c- K_nu), nu = sqrt(delta)/2,
// of z^2 B'' + z B' - (z^2 + delta/4) B = 0 with data at z = 1.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blowuplab/bessel.hpp"
#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/fit.hpp"

namespace blowuplab {

/// ln(e^{-r} phi_1(r)), without forming the O(r) exponent.
inline double log_phi1_scaled(double r, int n) {
  if (n < 1) throw validation_error("dimension n must be >= 1");
  if (!(r >= 0)) throw validation_error("radius must be >= 0");
  if (n == 1) return std::log1p(std::exp(-2.0 * r));
  if (r == 0.0) return std::log(sphere_area(n));
  const double nu = n / 2.0 - 1.0;
  return n / 2.0 * std::log(2.0 * std::numbers::pi) + (1.0 - n / 2.0) * std::log(r) + std::log(bessel_i_scaled(nu, r));
}

/// ln phi_1(r); finite for all r >= 0.
inline double log_phi1(double r, int n) { return log_phi1_scaled(r, n) + r; }

inline double phi1(double r, int n) { return std::exp(log_phi1(r, n)); }

/// e^{-r} phi_1(r), bounded by |S^{n-1}|.
inline double phi1_scaled(double r, int n) { return std::exp(log_phi1_scaled(r, n)); }

inline double psi1(double r, double t, int n) {
  if (!(t >= 0)) throw validation_error("t must be >= 0");
  return std::exp(log_phi1(r, n) - t);
}

// --- multipliers ---------------------------------------------------------------

struct MultiplierSpec {
  enum class Kind { ScaleInvariant, Scattering };
  Kind kind = Kind::ScaleInvariant;
  double mu1 = 0.0;   // ScaleInvariant
  double nu1 = 0.0;   // Scattering
  double beta = 2.0;  // Scattering, > 1

  static MultiplierSpec scale_invariant(double mu1) { return {Kind::ScaleInvariant, mu1, 0.0, 2.0}; }
  static MultiplierSpec scattering(double nu1, double beta) { return {Kind::Scattering, 0.0, nu1, beta}; }
};

/// e^t (1+t)^{(mu1-1)/2}, or exp(nu1 (1+t)^{1-beta} / (1-beta)).
inline double multiplier(const MultiplierSpec& m, double t) {
  if (!(t >= 0)) throw validation_error("t must be >= 0");
  if (m.kind == MultiplierSpec::Kind::ScaleInvariant)
    return std::exp(t + (m.mu1 - 1.0) / 2.0 * std::log1p(t));
  if (!(m.beta > 1)) throw validation_error("scattering multiplier needs beta > 1");
  return std::exp(m.nu1 * std::pow(1.0 + t, 1.0 - m.beta) / (1.0 - m.beta));
}

// --- c+- -------------------------------------------------------------------------

struct CoefficientPair {
  double c_plus = 0.0;
  double c_minus = 0.0;
  double integral_f_phi1 = 0.0;
  double integral_h_phi1 = 0.0;
};

/// c+- = +-B^-+_nu(1) int h phi_1 + [-+sqrt(delta) B^-+_nu(1) + B^-+_{nu+1}(1)] int f phi_1,
/// with B^+ = I, B^- = K, nu = sqrt(delta)/2.
inline CoefficientPair coefficients_cpm(double int_f_phi1, double int_h_phi1, double delta) {
  if (!std::isfinite(delta)) throw validation_error("delta must be finite");
  if (delta < 0) throw unsupported_regime("c+- needs delta >= 0");
  const double sd = std::sqrt(delta), nu = sd / 2.0;
  const double I0 = bessel_I(nu, 1.0), I1 = bessel_I(nu + 1.0, 1.0);
  const double K0 = bessel_K(nu, 1.0), K1 = bessel_K(nu + 1.0, 1.0);
  CoefficientPair c{K0 * int_h_phi1 + (K1 - sd * K0) * int_f_phi1,
                    -I0 * int_h_phi1 + (I1 + sd * I0) * int_f_phi1, int_f_phi1, int_h_phi1};
  if (int_f_phi1 >= 0 && int_h_phi1 >= 0 && (int_f_phi1 > 0 || int_h_phi1 > 0) && !(c.c_plus > 0))
    throw numerical_failure("c+ not positive for nonnegative data integrals");
  return c;
}

struct HomogeneousBound {
  double B0 = 0.0;     // eps (c+ I_nu(z) + c- K_nu(z)); may overflow to inf for large z
  double ratio = 0.0;  // B0 / (eps z^{-1/2} e^z)
  double floor = 0.0;  // c+ / (2 sqrt(2 pi)), half the limit of the ratio
  double z0 = 0.0;     // ratio >= floor for all sampled z >= z0; inf when c+ <= 0
};

/// The ratio B0(z) / (eps z^{-1/2} e^z), computed without forming e^z.
inline double homogeneous_ratio(const CoefficientPair& c, double delta, double z) {
  const double nu = std::sqrt(delta) / 2.0;
  return std::sqrt(z) * (c.c_plus * bessel_i_scaled(nu, z) + c.c_minus * bessel_k_scaled(nu, z) * std::exp(-2.0 * z));
}

/// Evaluates B0 at z and locates z0 on the grid z = 1, 1.25, ..., 200.
inline HomogeneousBound homogeneous_lower_bound(const CoefficientPair& c, double delta, double eps, double z) {
  if (!(z >= 1)) throw validation_error("z must be >= 1");
  if (delta < 0) throw unsupported_regime("homogeneous bound needs delta >= 0");
  HomogeneousBound b;
  b.ratio = homogeneous_ratio(c, delta, z);
  b.B0 = eps * b.ratio * std::exp(z) / std::sqrt(z);
  if (!(c.c_plus > 0)) {
    b.z0 = kInf;
    return b;
  }
  b.floor = c.c_plus / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  b.z0 = 1.0;
  for (int k = 0; k <= 796; ++k) {
    const double zk = 1.0 + 0.25 * k;
    if (homogeneous_ratio(c, delta, zk) < b.floor) b.z0 = zk + 0.25;
  }
  return b;
}

// --- psi1 integral estimate ------------------------------------------------------

/// int_{|x| <= t+R} psi_1^{p/(p-1)} dx divided by (1+t)^{(n-1)(1 - p/(2(p-1)))}.
inline double yz_bound_ratio(int n, double p, double t, double R) {
  if (n < 1) throw validation_error("dimension n must be >= 1");
  if (!(p > 1)) throw validation_error("p must be > 1");
  if (!(t >= 0)) throw validation_error("t must be >= 0");
  if (!(R >= 1)) throw validation_error("R must be >= 1");
  const double q = p / (p - 1.0);
  const double rho = t + R;
  // psi_1^q r^{n-1} relative to its value at rho, in s = rho - r, with the e^{-q s} decay split off
  const double base = log_phi1_scaled(rho, n);
  auto g = [&](double s) {
    const double r = rho - s;
    if (r <= 0) return n == 1 ? std::exp(q * (log_phi1_scaled(0.0, n) - base - rho)) : 0.0;
    return std::exp(q * (log_phi1_scaled(r, n) - base) - q * s + (n - 1) * std::log1p(-s / rho));
  };
  double total = 0.0;
  for (double lo = 0.0; lo < rho;) {
    const double hi = std::min(rho, lo + 4.0);
    double err = 0.0;
    const double part = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, lo, hi, 15, 1e-12, &err);
    if (!std::isfinite(part) || err > 1e-8 * (total + part) + 1e-300)
      throw numerical_failure("yz quadrature did not converge");
    total += part;
    if (part <= 1e-17 * total) break;
    lo = hi;
  }
  const double lhs_log = std::log(sphere_area(n) * total) + q * (base + R) + (n - 1) * std::log(rho);
  const double rhs_log = (n - 1) * (1.0 - p / (2.0 * (p - 1.0))) * std::log1p(t);
  const double ratio = std::exp(lhs_log - rhs_log);
  if (!(ratio > 0) || !std::isfinite(ratio)) throw numerical_failure("yz ratio out of range at t = " + std::to_string(t));
  return ratio;
}

struct YzSweep {
  std::vector<double> t, ratio;
  double log_slope = 0.0;  // least-squares slope of ln ratio against ln t
};

/// Ratios at `count` log-spaced times in [t_lo, t_hi].
inline YzSweep yz_sweep(int n, double p, double t_lo, double t_hi, int count, double R = 1.0) {
  if (!(t_lo > 0) || !(t_hi > t_lo) || count < 2) throw validation_error("need 0 < t_lo < t_hi and count >= 2");
  YzSweep s;
  std::vector<double> lt, lr;
  for (int i = 0; i < count; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (count - 1));
    s.t.push_back(t);
    s.ratio.push_back(yz_bound_ratio(n, p, t, R));
    lt.push_back(std::log(t));
    lr.push_back(std::log(s.ratio.back()));
  }
  s.log_slope = linear_fit(lt, lr).slope;
  return s;
}

}  // namespace blowuplab
