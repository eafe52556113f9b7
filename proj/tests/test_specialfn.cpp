#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "blowuplab/specialfn.hpp"
#include "gen.hpp"

using namespace blowuplab;

namespace {

constexpr double kPi = std::numbers::pi;

// int_{S^1} e^{x.w} dS_w with x = r e_1, trapezoid in the angle (spectral for periodic integrands).
double sphere_oracle_2d(double r) {
  const int m = 256;
  double s = 0.0;
  for (int k = 0; k < m; ++k) s += std::exp(r * std::cos(2.0 * kPi * k / m));
  return s * 2.0 * kPi / m;
}

// int_{S^2} e^{x.w} dS_w with x = r (1, 2, 2) / 3: Gauss-Legendre in cos(theta), trapezoid in phi.
double sphere_oracle_3d(double r) {
  const double x[3] = {r / 3.0, 2.0 * r / 3.0, 2.0 * r / 3.0};
  const int m = 128;
  auto ring = [&](double c) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      const double ph = 2.0 * kPi * k / m;
      acc += std::exp(x[0] * s * std::cos(ph) + x[1] * s * std::sin(ph) + x[2] * c);
    }
    return acc * 2.0 * kPi / m;
  };
  return boost::math::quadrature::gauss<double, 40>::integrate(ring, -1.0, 1.0);
}

// phi'' + (n-1)/r phi' - phi with centered differences of step h.
double laplacian_residual(int n, double r, double h) {
  const double fm = phi1(r - h, n), f0 = phi1(r, n), fp = phi1(r + h, n);
  return (fp - 2.0 * f0 + fm) / (h * h) + (n - 1) / r * (fp - fm) / (2.0 * h) - f0;
}

}  // namespace

TEST(Phi1, Examples) {
  EXPECT_DOUBLE_EQ(phi1(0.0, 1), 2.0);
  EXPECT_NEAR(phi1(1.0, 3), 4.0 * kPi * std::sinh(1.0), 1e-12);
  EXPECT_NEAR(phi1(1.0, 3), 14.7680, 1e-4);
  EXPECT_NEAR(phi1(1.0, 2), 7.95493, 1e-5);
  for (int n = 1; n <= 6; ++n) EXPECT_DOUBLE_EQ(phi1(0.0, n), sphere_area(n));
  EXPECT_NEAR(phi1(2.5, 1), std::exp(2.5) + std::exp(-2.5), 1e-12);
}

TEST(Phi1, ContinuousAtOrigin) {
  for (int n = 2; n <= 5; ++n) EXPECT_LT(std::abs(phi1(1e-6, n) / sphere_area(n) - 1.0), 1e-10) << n;
}

TEST(Phi1, MatchesSphereQuadrature) {
  for (double r : gen::linspace(0.1, 5.0, 50)) {
    EXPECT_LT(std::abs(phi1(r, 2) / sphere_oracle_2d(r) - 1.0), 1e-8) << r;
    EXPECT_LT(std::abs(phi1(r, 3) / sphere_oracle_3d(r) - 1.0), 1e-8) << r;
  }
}

TEST(Phi1, LaplacianResidual) {
  for (int n = 1; n <= 3; ++n)
    for (double r : gen::linspace(0.1, 5.0, 50))
      EXPECT_LT(std::abs(laplacian_residual(n, r, 1e-3)) / phi1(r, n), 1e-6) << n << ' ' << r;
}

TEST(Phi1, LaplacianResidualSecondOrder) {
  for (int n = 1; n <= 3; ++n)
    for (double r : {0.5, 1.0, 3.0}) {
      const double e1 = std::abs(laplacian_residual(n, r, 0.1));
      const double e2 = std::abs(laplacian_residual(n, r, 0.05));
      const double e3 = std::abs(laplacian_residual(n, r, 0.025));
      EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.05) << n << ' ' << r;
      EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.05) << n << ' ' << r;
    }
}

TEST(Psi1, DefinitionAndLightCone) {
  for (int n = 1; n <= 3; ++n) {
    EXPECT_DOUBLE_EQ(psi1(1.3, 0.0, n), phi1(1.3, n));
    EXPECT_NEAR(psi1(1.3, 2.0, n), std::exp(-2.0) * phi1(1.3, n), 1e-12 * phi1(1.3, n));
    const double R = 1.0;
    const double ref = psi1(1.0 + R, 1.0, n);
    for (double t : gen::linspace(1.0, 50.0, 99)) {
      const double v = psi1(t + R, t, n);
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 2.0 * ref) << n << ' ' << t;
    }
  }
  EXPECT_THROW(psi1(1.0, -1.0, 2), validation_error);
}

TEST(Multiplier, Examples) {
  EXPECT_DOUBLE_EQ(multiplier(MultiplierSpec::scale_invariant(1.0), 0.0), 1.0);
  EXPECT_NEAR(multiplier(MultiplierSpec::scale_invariant(3.0), 2.0), std::exp(2.0) * 3.0, 1e-12);
  EXPECT_NEAR(multiplier(MultiplierSpec::scattering(2.0, 2.0), 0.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(multiplier(MultiplierSpec::scattering(1.0, 2.0), 1e12), 1.0, 1e-11);
}

TEST(Multiplier, ScatteringBetweenInitialValueAndOne) {
  gen::for_all(21, 500, [](gen::Source& s, int) {
    const auto m = MultiplierSpec::scattering(s.uniform(0.01, 5.0), s.uniform(1.05, 4.0));
    const double t = s.log_uniform(1e-3, 1e3);
    const double v = multiplier(m, t);
    EXPECT_GT(v, multiplier(m, 0.0));
    EXPECT_LT(v, 1.0);
  });
}

TEST(Coefficients, Examples) {
  const auto a = coefficients_cpm(0.0, 1.0, 1.0);
  EXPECT_NEAR(a.c_plus, std::sqrt(kPi / 2.0) * std::exp(-1.0), 1e-12);
  EXPECT_NEAR(a.c_plus, 0.4610685, 1e-7);
  const auto b = coefficients_cpm(1.0, 0.0, 0.0);
  EXPECT_NEAR(b.c_plus, 0.6019072, 1e-7);
  EXPECT_NEAR(b.c_plus, std::cyl_bessel_k(1.0, 1.0), 1e-12);
  EXPECT_NEAR(b.c_minus, std::cyl_bessel_i(1.0, 1.0), 1e-12);
  EXPECT_THROW(coefficients_cpm(1.0, 1.0, -0.5), unsupported_regime);
}

// B0 = c+ I_nu + c- K_nu must reproduce B0(1) = int f phi_1 and
// B0'(1) = int h phi_1 - (sqrt(delta)/2) int f phi_1 (eps = 1).
TEST(Coefficients, ReconstructInitialData) {
  gen::for_all(31, 300, [](gen::Source& s, int) {
    const double F = s.uniform(-2.0, 2.0), H = s.uniform(-2.0, 2.0), delta = s.uniform(0.0, 30.0);
    const auto c = coefficients_cpm(F, H, delta);
    const double nu = std::sqrt(delta) / 2.0;
    const double I = std::cyl_bessel_i(nu, 1.0), K = std::cyl_bessel_k(nu, 1.0);
    const double Ip = std::cyl_bessel_i(nu + 1.0, 1.0) + nu * I;
    const double Kp = -std::cyl_bessel_k(nu + 1.0, 1.0) + nu * K;
    EXPECT_NEAR(c.c_plus * I + c.c_minus * K, F, 1e-10 * (1.0 + std::abs(F)));
    EXPECT_NEAR(c.c_plus * Ip + c.c_minus * Kp, H - nu * F, 1e-10 * (1.0 + std::abs(H) + std::abs(F)));
  });
}

// The lowered-order form: c+- = +-B^-+_nu(1) int h phi_1 + B^-+_{nu-1}(1) int f phi_1 for delta > 0.
TEST(Coefficients, LoweredOrderForm) {
  gen::for_all(32, 200, [](gen::Source& s, int) {
    const double F = s.uniform(0.0, 2.0), H = s.uniform(0.0, 2.0), delta = s.uniform(0.01, 30.0);
    const auto c = coefficients_cpm(F, H, delta);
    const double nu = std::sqrt(delta) / 2.0;
    // K is even in the order; I_{nu-1} for nu < 1 is I_{1-nu} + (2/pi) sin((1-nu) pi) K_{1-nu}
    const double Km = std::cyl_bessel_k(std::abs(nu - 1.0), 1.0);
    double Im = nu >= 1.0 ? std::cyl_bessel_i(nu - 1.0, 1.0)
                          : std::cyl_bessel_i(1.0 - nu, 1.0) + 2.0 / kPi * std::sin((1.0 - nu) * kPi) * std::cyl_bessel_k(1.0 - nu, 1.0);
    EXPECT_NEAR(c.c_plus, std::cyl_bessel_k(nu, 1.0) * H + Km * F, 1e-10 * (1.0 + c.c_plus));
    EXPECT_NEAR(c.c_minus, -std::cyl_bessel_i(nu, 1.0) * H + Im * F, 1e-10 * (1.0 + std::abs(c.c_minus)));
  });
}

TEST(Coefficients, PositiveForNonnegativeData) {
  gen::for_all(33, 1000, [](gen::Source& s, int i) {
    double F = s.uniform(0.0, 3.0), H = s.uniform(0.0, 3.0);
    if (i % 10 == 0) F = 0.0;
    if (i % 10 == 5) H = 0.0;
    EXPECT_GT(coefficients_cpm(F, H, s.uniform(0.0, 50.0)).c_plus, 0.0);
  });
}

TEST(HomogeneousBound, LeadingTermOnly) {
  const CoefficientPair c{1.0, 0.0, 0.0, 0.0};
  for (double delta : {0.0, 1.0, 4.0}) {
    const auto b = homogeneous_lower_bound(c, delta, 0.01, 1000.0);
    EXPECT_NEAR(b.ratio, 1.0 / std::sqrt(2.0 * kPi), 2e-3) << delta;
    EXPECT_LT(b.z0, 10.0);
  }
}

TEST(HomogeneousBound, DecayingPartOnly) {
  const CoefficientPair c{0.0, 1.0, 0.0, 0.0};
  double prev = kInf;
  for (double z : {1.0, 5.0, 10.0, 20.0}) {
    const auto b = homogeneous_lower_bound(c, 1.0, 1.0, z);
    EXPECT_LT(b.ratio, prev);
    prev = b.ratio;
    EXPECT_EQ(b.z0, kInf);
  }
  EXPECT_LT(prev, 1e-15);
}

TEST(HomogeneousBound, MixedSignsStabilize) {
  const auto c = coefficients_cpm(1.0, -0.5, 2.0);
  ASSERT_GT(c.c_plus, 0.0);
  const auto b = homogeneous_lower_bound(c, 2.0, 1e-3, 5.0);
  EXPECT_LT(b.z0, 5.0);
  double lo = kInf, hi = 0.0;
  for (double z : gen::linspace(5.0, 40.0, 71)) {
    const double r = homogeneous_ratio(c, 2.0, z);
    EXPECT_GE(r, b.floor);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  EXPECT_LT(hi / lo, 1.1);
  // B0 itself against the direct product
  const double z = 7.0, nu = std::sqrt(2.0) / 2.0;
  EXPECT_NEAR(b.B0 * 0.0 + homogeneous_lower_bound(c, 2.0, 1e-3, z).B0,
              1e-3 * (c.c_plus * std::cyl_bessel_i(nu, z) + c.c_minus * std::cyl_bessel_k(nu, z)), 1e-9);
}

TEST(YzBound, FlatInTime) {
  for (int n = 1; n <= 3; ++n) {
    const auto s = yz_sweep(n, 2.0, 1.0, 100.0, 12);
    EXPECT_LE(std::abs(s.log_slope), 0.05) << n;
  }
  const double r1 = yz_bound_ratio(1, 2.0, 1.0, 1.0), r10 = yz_bound_ratio(1, 2.0, 10.0, 1.0),
               r100 = yz_bound_ratio(1, 2.0, 100.0, 1.0);
  EXPECT_LT(std::max({r1, r10, r100}) / std::min({r1, r10, r100}), 3.0);
}

// n = 1, p = 2: 2 int_0^{t+R} e^{-2t} (2 cosh r)^2 dr in closed form.
TEST(YzBound, ClosedFormOneDimension) {
  for (double t : {0.0, 1.0, 7.5, 40.0}) {
    const double rho = t + 1.0;
    const double exact = 2.0 * std::exp(-2.0 * t) * (std::sinh(2.0 * rho) + 2.0 * rho);
    EXPECT_LT(std::abs(yz_bound_ratio(1, 2.0, t, 1.0) / exact - 1.0), 1e-10) << t;
  }
}

TEST(YzBound, Preconditions) {
  const double r0 = yz_bound_ratio(3, 2.0, 0.0, 1.0);
  EXPECT_TRUE(std::isfinite(r0));
  EXPECT_GT(r0, 0.0);
  EXPECT_THROW(yz_bound_ratio(2, 1.0, 1.0, 1.0), validation_error);
  EXPECT_THROW(yz_bound_ratio(2, 2.0, 1.0, 0.5), validation_error);
}

TEST(Phi1, ScaledLogMatchesUnscaled) {
  for (int n : {1, 2, 3, 5})
    for (double r : {0.0, 0.3, 4.0, 25.0, 300.0}) EXPECT_NEAR(log_phi1_scaled(r, n), log_phi1(r, n) - r, 1e-12 * (1 + r)) << n << ' ' << r;
}

// Large q = p/(p-1) makes the integrand a narrow layer at the light cone.
TEST(YzBound, StableForLargeTimesAndSmallP) {
  for (int n : {1, 3}) {
    const double a = yz_bound_ratio(n, 1.01, 1e6, 1.0);
    const double b = yz_bound_ratio(n, 1.01, 1e12, 1.0);
    ASSERT_TRUE(std::isfinite(a) && a > 0) << n;
    EXPECT_NEAR(a / b, 1.0, 1e-4) << n;
  }
}
