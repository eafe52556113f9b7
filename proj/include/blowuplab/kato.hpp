#pragma once

// Iteration lemma for
//
//   F(t) >= E A t^a ln(1+t)^c,
//   F(t) >= B int_{T0}^t ds int_{T0}^s r^{-b} F(r)^p dr,
//
// giving T < C * T~ with E T~^{gamma/(2(p-1))} ln(1+T~)^c = 1.

#include <cmath>
#include <cstddef>
#include <vector>

#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/lifespan.hpp"

namespace blowuplab {

struct KatoInput {
  double p = 2.0;
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double T0 = 0.0;
  double E = 0.01;
  double A = 1.0;
  double B = 1.0;

  void validate() const {
    if (!(p > 1) || !std::isfinite(p)) throw validation_error("p must be > 1");
    if (!std::isfinite(a) || !std::isfinite(b)) throw validation_error("a and b must be finite");
    if (!(c >= 0) || !std::isfinite(c)) throw validation_error("c must be >= 0");
    if (!(T0 >= 0) || !std::isfinite(T0)) throw validation_error("T0 must be >= 0");
    if (!(E > 0) || !(A > 0) || !(B > 0)) throw validation_error("E, A, B must be > 0");
  }
};

/// gamma_k = 2[(p-1)a - b + k].
inline double kato_gamma_k(double p, double a, double b, int k) {
  if (!(p > 1)) throw validation_error("p must be > 1");
  if (k < 1) throw validation_error("k must be a positive integer");
  return 2.0 * ((p - 1.0) * a - b + k);
}

inline double kato_gamma(double p, double a, double b) { return kato_gamma_k(p, a, b, 2); }

/// [a]_+ + ([b]_- + 2)/(p-1); the growth rate of a_j / p^{j-1}.
inline double kato_growth(double p, double a, double b) {
  return positive_part(a) + (negative_part(b) + 2.0) / (p - 1.0);
}

/// C~ = B / ([a]_+ + ([b]_- + 2)/(p-1))^2.
inline double kato_c_tilde(const KatoInput& in) {
  const double g = kato_growth(in.p, in.a, in.b);
  return in.B / (g * g);
}

/// Partial sum S_j = sum_{k=1}^{j-1} (2k ln p - ln C~) / p^k.
inline double s_partial(double p, double c_tilde, int j) {
  double s = 0.0;
  const double lp = std::log(p), lc = std::log(c_tilde);
  double pk = 1.0;
  for (int k = 1; k < j; ++k) {
    pk *= p;
    s += (2.0 * k * lp - lc) / pk;
  }
  return s;
}

/// Limit of the partial sums: 2p ln p/(p-1)^2 + ln C~/(1-p).
inline double s_infinity(double p, double c_tilde) {
  if (!(p > 1) || !(c_tilde > 0)) throw validation_error("s_infinity needs p > 1 and C~ > 0");
  return 2.0 * p * std::log(p) / ((p - 1.0) * (p - 1.0)) + std::log(c_tilde) / (1.0 - p);
}

/// ln{C~^{p/(1-p)} p^{2p/(1-p)^2}}, the closed form as printed in the source.
/// Differs from s_infinity by ln C~; kept only to exhibit the discrepancy.
inline double s_infinity_printed(double p, double c_tilde) {
  return p / (1.0 - p) * std::log(c_tilde) + 2.0 * p / ((1.0 - p) * (1.0 - p)) * std::log(p);
}

/// Tail bound sum_{k>=j} (2k ln p + |ln C~|)/p^k for |S_inf - S_j|.
inline double s_tail_bound(double p, double c_tilde, int j) {
  const double lp = std::log(p), lc = std::abs(std::log(c_tilde));
  const double x = 1.0 / p;
  const double xj = std::pow(x, j);
  // sum_{k>=j} k x^k = x^j (j - (j-1) x) / (1-x)^2
  const double sk = xj * (j - (j - 1) * x) / ((1 - x) * (1 - x));
  const double s1 = xj / (1 - x);
  return 2.0 * lp * sk + lc * s1;
}

struct IterationTrace {
  int j_max = 0;
  bool truncated = false;  // stopped early because p^j left the double range
  std::vector<double> a_seq, b_seq, c_seq, logD_seq;  // index 0 is j = 1
};

inline IterationTrace iterate(const KatoInput& in, int j_max) {
  in.validate();
  if (j_max < 1) throw validation_error("j_max must be >= 1");
  const double p = in.p;
  const double bm = negative_part(in.b), bp = positive_part(in.b);
  IterationTrace tr;
  double a = positive_part(in.a), b = negative_part(in.a), c = in.c;
  double logD = std::log(in.E * in.A);
  const double logB = std::log(in.B);
  for (int j = 1; j <= j_max; ++j) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(logD)) {
      tr.truncated = true;
      break;
    }
    tr.a_seq.push_back(a);
    tr.b_seq.push_back(b);
    tr.c_seq.push_back(c);
    tr.logD_seq.push_back(logD);
    tr.j_max = j;
    const double a_next = p * a + bm + 2.0;
    logD = p * logD + logB - 2.0 * std::log(a_next);
    a = a_next;
    b = p * b + bp;
    c = p * c;
  }
  return tr;
}

/// Closed forms of the sequences at index j >= 1.
struct SequenceClosedForm {
  double a, b, c;
};

inline SequenceClosedForm closed_form(const KatoInput& in, int j) {
  const double p = in.p, pj = std::pow(p, j - 1);
  const double bm = negative_part(in.b), bp = positive_part(in.b);
  return {pj * (positive_part(in.a) + (bm + 2.0) / (p - 1.0)) - (bm + 2.0) / (p - 1.0),
          pj * (negative_part(in.a) + bp / (p - 1.0)) - bp / (p - 1.0), pj * in.c};
}

/// Lower bound p^{j-1}(ln(EA) - S_j) for ln D_j.
inline double log_d_lower_bound(const KatoInput& in, int j) {
  return std::pow(in.p, j - 1) * (std::log(in.E * in.A) - s_partial(in.p, kato_c_tilde(in), j));
}

/// log of F's ansatz lower bound D_j ln(1+T~)^{c_j} t^{-b_j} (t - T~)^{a_j}, t > T~.
inline double log_ansatz(const IterationTrace& tr, int j, double T_tilde, double t) {
  const std::size_t k = j - 1;
  double v = tr.logD_seq[k] - tr.b_seq[k] * std::log(t) + tr.a_seq[k] * std::log(t - T_tilde);
  if (tr.c_seq[k] != 0.0) v += tr.c_seq[k] * std::log(std::log1p(T_tilde));
  return v;
}

/// Solves E T~^{gamma/(2(p-1))} ln(1+T~)^c = 1.
inline double threshold_time(const KatoInput& in) {
  in.validate();
  const double g = kato_gamma(in.p, in.a, in.b);
  if (!(g > 0)) throw validation_error("threshold_time needs gamma > 0");
  if (!(in.E < 1)) throw validation_error("threshold_time needs E in (0, 1)");
  return solve_lifespan({1.0, g / (2.0 * (in.p - 1.0)), in.c, LawTag::HeatLike}, in.E);
}

struct KatoDerived {
  double gamma = 0.0;
  double C_tilde = 0.0;
  double S_inf = 0.0;
  double T_tilde = 0.0;
  double C_amp = 0.0;
  double J = 0.0;
  bool T_tilde_after_T0 = false;  // the lemma needs T~ >= T0
};

/// J(C) = A e^{-S_inf} (1 - 1/C)^{growth} C^{gamma/(2(p-1))}, increasing in C > 1.
inline double kato_log_j(const KatoInput& in, double s_inf, double C) {
  const double g = kato_gamma(in.p, in.a, in.b);
  return std::log(in.A) - s_inf + kato_growth(in.p, in.a, in.b) * std::log1p(-1.0 / C) +
         g / (2.0 * (in.p - 1.0)) * std::log(C);
}

inline KatoDerived amplification_constant(const KatoInput& in) {
  in.validate();
  KatoDerived d;
  d.gamma = kato_gamma(in.p, in.a, in.b);
  if (!(d.gamma > 0)) throw validation_error("amplification_constant needs gamma > 0");
  d.C_tilde = kato_c_tilde(in);
  d.S_inf = s_infinity(in.p, d.C_tilde);
  d.T_tilde = threshold_time(in);
  d.T_tilde_after_T0 = d.T_tilde >= in.T0;

  auto logJ = [&](double C) { return kato_log_j(in, d.S_inf, C); };
  double lo = 1.0, hi = 2.0;
  while (logJ(hi) <= 0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw numerical_failure("amplification_constant: no bracket");
  }
  // keep J(hi) > 1 and shrink until the bracket is below 1e-6 relative and J(hi) <= 1 + 1e-3
  while (hi - lo > 1e-7 * hi || logJ(hi) > std::log1p(1e-3)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (logJ(mid) > 0 ? hi : lo) = mid;
  }
  d.C_amp = hi;
  d.J = std::exp(logJ(hi));
  return d;
}

}  // namespace blowuplab
