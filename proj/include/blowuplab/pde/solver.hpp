#pragma once

// Radial solver for u_tt - Lap u + a(t) u_t + b(t) u = |u|^p.
//
// Space: cell-centred finite volumes on [0, r_max], r_i = (i + 1/2) dr, with
// face areas |S^{n-1}| r^{n-1}. The flux through r = 0 vanishes (even
// extension), the outer boundary is u = 0 and is never reached.
// Time: kick-drift-kick leapfrog; each half kick treats the damping by the
// trapezoidal rule, so the linear damping part is unconditionally stable.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/fit.hpp"
#include "blowuplab/pde/config.hpp"
#include "blowuplab/specialfn.hpp"

namespace blowuplab::pde {

struct RadialGrid {
  int n = 1;
  double dr = 0.0;
  std::vector<double> r;     // cell centres
  std::vector<double> vol;   // cell measures, sum = |B(r_max)|
  std::vector<double> area;  // face areas at i*dr, i = 0..N; area[0] is unused
  std::vector<double> log_phi1;

  int size() const { return static_cast<int>(r.size()); }
};

inline RadialGrid make_grid(int n, double dr, int cells) {
  if (n < 1 || !(dr > 0) || cells < 2) throw validation_error("bad grid");
  RadialGrid g{n, dr, {}, {}, {}, {}};
  const double S = sphere_area(n);
  g.r.resize(cells);
  g.vol.resize(cells);
  g.area.resize(cells + 1);
  g.log_phi1.resize(cells);
  for (int i = 0; i <= cells; ++i) g.area[i] = S * std::pow(i * dr, n - 1);
  for (int i = 0; i < cells; ++i) {
    g.r[i] = (i + 0.5) * dr;
    g.vol[i] = S * (std::pow((i + 1) * dr, n) - std::pow(i * dr, n)) / n;
    g.log_phi1[i] = blowuplab::log_phi1(g.r[i], n);
  }
  return g;
}

/// Discrete radial Laplacian; self-adjoint in the vol-weighted inner product.
inline void radial_laplacian(const RadialGrid& g, const std::vector<double>& u, std::vector<double>& out) {
  const int N = g.size();
  for (int i = 0; i < N; ++i) {
    const double right = g.area[i + 1] * ((i + 1 < N ? u[i + 1] : 0.0) - u[i]);
    const double left = i > 0 ? g.area[i] * (u[i] - u[i - 1]) : 0.0;
    out[i] = (right - left) / (g.dr * g.vol[i]);
  }
}

inline double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

// --- initial data ---------------------------------------------------------------

/// Radial profile with f(0) = amplitude and support in r < R (except "flat").
inline double profile(const DataProfile& d, double r) {
  if (d.shape == Shape::Flat) return d.amplitude;
  const double x = r / d.R;
  if (x >= 1.0) return 0.0;
  if (d.shape == Shape::Poly) return d.amplitude * std::pow(1.0 - x * x, 4);
  return d.amplitude * std::exp(1.0 - 1.0 / (1.0 - x * x));
}

struct InitialData {
  std::vector<double> f, g;  // unscaled by eps
  double int_f = 0.0, int_g = 0.0, int_h = 0.0;
  double int_f_phi1 = 0.0, int_h_phi1 = 0.0;
  double h_coef = 0.0;  // h = h_coef f + g; NaN when delta < 0
};

inline InitialData make_initial_data(const SimConfig& c, const RadialGrid& g) {
  InitialData d;
  const double delta = c.model.delta();
  d.h_coef = delta >= -kDeltaTolerance ? (c.model.h_mu1() - 1.0 + std::sqrt(std::max(delta, 0.0))) / 2.0 : NAN;
  if (c.data.data_class != DataClass::Custom && std::isnan(d.h_coef))
    throw unsupported_regime("h data classes need delta >= 0");
  const int N = g.size();
  d.f.resize(N);
  d.g.resize(N);
  for (int i = 0; i < N; ++i) {
    d.f[i] = profile(c.data, g.r[i]);
    switch (c.data.data_class) {
      case DataClass::HPositive: d.g[i] = d.f[i]; break;
      case DataClass::HZero: d.g[i] = -d.h_coef * d.f[i]; break;
      case DataClass::Custom: d.g[i] = c.data.g_ratio * d.f[i]; break;
    }
  }
  for (int i = 0; i < N; ++i) {
    const double w = g.vol[i], phi = std::exp(g.log_phi1[i]);
    const double h = d.h_coef * d.f[i] + d.g[i];
    d.int_f += w * d.f[i];
    d.int_g += w * d.g[i];
    d.int_h += w * h;
    if (d.f[i] != 0.0) {
      d.int_f_phi1 += w * d.f[i] * phi;
      d.int_h_phi1 += w * h * phi;
    }
    if (c.data.data_class == DataClass::HPositive && d.f[i] > 0 && !(h > 0))
      throw validation_error("h_positive data class needs h > 0 on the support of f");
  }
  if (c.data.data_class == DataClass::HPositive &&
      !(d.int_f >= 0 && d.int_h > 0 && d.int_f_phi1 >= 0 && d.int_h_phi1 > 0))
    throw validation_error("h_positive data violates the integral sign conditions");
  return d;
}

// --- run -------------------------------------------------------------------------

enum class SimStatus { BlewUp, ReachedTmax, NumericalFailure };

inline const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::BlewUp: return "BlewUp";
    case SimStatus::ReachedTmax: return "ReachedTmax";
    case SimStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

struct SeriesPoint {
  double t = 0.0;
  double F0 = 0.0;       // int u dx
  double F1 = 0.0;       // int u psi_1 dx
  double sup = 0.0;      // max |u|
  double dF0 = 0.0;      // int u_t dx
  double dF1 = 0.0;      // d/dt F1 = int u_t psi_1 dx - F1
  double src = 0.0;      // int |u|^p dx
  double src_psi = 0.0;  // int |u|^p psi_1 dx
  double front = 0.0;    // largest r_i with |u_i| > 1e-14, 0 if none
};

struct SimResult {
  SimStatus status = SimStatus::ReachedTmax;
  std::optional<double> T_est;         // BlewUp only
  std::optional<double> T_est_refined;  // same fit at blowup_factor^2
  double threshold_sensitivity = 0.0;   // |T_est - T_est_refined| / T_est_refined
  std::vector<SeriesPoint> series;
  long steps = 0;
  double max_front_excess = 0.0;  // max over samples of front - (t + R)
  std::string message;
  InitialData data;
};

struct SimState {
  double t = 0.0;
  std::vector<double> u, v;
};

inline SimConfig validated(SimConfig c) {
  c.validate();
  return c;
}

class Simulator {
 public:
  explicit Simulator(SimConfig c)
      : cfg_(validated(std::move(c))), grid_(make_grid(cfg_.model.n, cfg_.grid.dr, cfg_.grid.cells())),
        data_(make_initial_data(cfg_, grid_)) {
    const int N = grid_.size();
    st_.u.resize(N);
    st_.v.resize(N);
    for (int i = 0; i < N; ++i) {
      st_.u[i] = cfg_.eps * data_.f[i];
      st_.v[i] = cfg_.eps * data_.g[i];
    }
    lap_.resize(N);
    acc_.resize(N);
    force(st_.u, st_.t, acc_);
  }

  const SimState& state() const { return st_; }
  const RadialGrid& grid() const { return grid_; }
  const InitialData& data() const { return data_; }
  const SimConfig& config() const { return cfg_; }

  double sup_norm() const {
    double s = 0.0;
    for (double x : st_.u) s = std::max(s, std::abs(x));
    return s;
  }

  /// dt = min(cfl dr, growth_cfl / max(1, sup^{(p-1)/2}), t_end - t).
  double next_dt(double t_end) const {
    const double growth = cfg_.grid.growth_cfl / std::max(1.0, std::pow(sup_norm(), (cfg_.p - 1.0) / 2.0));
    const double dt = std::min(cfg_.grid.cfl * cfg_.grid.dr, growth);
    const double left = t_end - st_.t;
    // split the remainder rather than finish with a sliver of a step
    if (left <= dt) return left;
    return left < 2.0 * dt ? left / 2.0 : dt;
  }

  /// One kick-drift-kick step; false when a field value is not finite.
  bool step(double dt) {
    const int N = grid_.size();
    const double a0 = cfg_.model.damping(st_.t), a1 = cfg_.model.damping(st_.t + dt);
    const double k0 = 1.0 / (1.0 + a0 * dt / 4.0), k1 = 1.0 / (1.0 + a1 * dt / 4.0);
    for (int i = 0; i < N; ++i) {
      st_.v[i] = (st_.v[i] * (1.0 - a0 * dt / 4.0) + dt / 2.0 * acc_[i]) * k0;
      st_.u[i] += dt * st_.v[i];
    }
    st_.t += dt;
    force(st_.u, st_.t, acc_);
    bool ok = true;
    for (int i = 0; i < N; ++i) {
      st_.v[i] = (st_.v[i] * (1.0 - a1 * dt / 4.0) + dt / 2.0 * acc_[i]) * k1;
      ok = ok && std::isfinite(st_.u[i]) && std::isfinite(st_.v[i]);
    }
    return ok;
  }

  SeriesPoint sample() const {
    SeriesPoint s;
    s.t = st_.t;
    const int N = grid_.size();
    double F1v = 0.0;
    for (int i = 0; i < N; ++i) {
      const double u = st_.u[i], w = grid_.vol[i];
      s.F0 += w * u;
      s.dF0 += w * st_.v[i];
      s.sup = std::max(s.sup, std::abs(u));
      const double up = cfg_.model.nonlinear ? abs_pow(u, cfg_.p) : 0.0;
      s.src += w * up;
      if (std::abs(u) > 1e-14) s.front = grid_.r[i];
      // psi_1 grows like e^{r - t}: combine in logs so that tiny u beyond the cone cannot overflow
      const double lw = std::log(w) + grid_.log_phi1[i] - st_.t;
      if (u != 0.0) s.F1 += std::copysign(std::exp(std::log(std::abs(u)) + lw), u);
      if (st_.v[i] != 0.0) F1v += std::copysign(std::exp(std::log(std::abs(st_.v[i])) + lw), st_.v[i]);
      if (up != 0.0) s.src_psi += std::exp(std::log(up) + lw);
    }
    s.dF1 = F1v - s.F1;
    return s;
  }

  SimResult run();

 private:
  void force(const std::vector<double>& u, double t, std::vector<double>& out) {
    const int N = grid_.size();
    const double b = cfg_.model.mass(t);
    if (cfg_.model.laplacian) radial_laplacian(grid_, u, lap_);
    for (int i = 0; i < N; ++i) {
      double f = -b * u[i];
      if (cfg_.model.laplacian) f += lap_[i];
      if (cfg_.model.nonlinear) f += abs_pow(u[i], cfg_.p);
      out[i] = f;
    }
  }

  SimConfig cfg_;
  RadialGrid grid_;
  InitialData data_;
  SimState st_;
  std::vector<double> lap_, acc_;
};

/// Fits sup^{-(p-1)/2} = c (T - t) over the samples of the last decade of growth
/// before `last` and returns T.
inline std::optional<double> fit_blowup_time(const std::vector<double>& t, const std::vector<double>& sup,
                                             std::size_t last, double p) {
  const double top = sup[last];
  std::vector<double> x, y;
  for (std::size_t k = last + 1; k-- > 0;) {
    if (sup[k] < top / 10.0) break;
    x.push_back(t[k]);
    y.push_back(std::pow(sup[k], -(p - 1.0) / 2.0));
  }
  if (x.size() < 3) return std::nullopt;
  const auto f = linear_fit(x, y);
  if (!(f.slope < 0)) return std::nullopt;
  return -f.intercept / f.slope;
}

inline SimResult Simulator::run() {
  SimResult res;
  res.data = data_;
  const double t_end = cfg_.stopping.t_max;
  const double sup0 = sup_norm();
  const double level1 = cfg_.stopping.blowup_factor * sup0;
  const double level2 = cfg_.stopping.blowup_factor * level1;
  std::vector<double> ht{st_.t}, hs{sup0};
  std::optional<std::size_t> cross1;
  auto record = [&] {
    res.series.push_back(sample());
    const auto& s = res.series.back();
    if (s.front > 0) res.max_front_excess = std::max(res.max_front_excess, s.front - (s.t + cfg_.data.R));
  };
  record();
  bool failed = false, reached2 = false;
  while (st_.t < t_end) {
    const double dt = next_dt(t_end);
    if (!(dt > 0)) break;
    if (!step(dt)) {
      failed = true;
      break;
    }
    ++res.steps;
    const double s = sup_norm();
    ht.push_back(st_.t);
    hs.push_back(s);
    if (!cross1 && res.steps % cfg_.stopping.sample_stride == 0) record();
    if (!cross1 && s > level1) {
      cross1 = ht.size() - 1;
      if (res.series.back().t != st_.t) record();
    }
    if (cross1 && s > level2) {
      reached2 = true;
      break;
    }
  }
  if (!cross1) {
    if (failed) {
      res.status = SimStatus::NumericalFailure;
      res.message = "non-finite field values at t = " + fmt17(st_.t);
    } else {
      res.status = SimStatus::ReachedTmax;
    }
    if (res.series.back().t != st_.t && !failed) record();
    return res;
  }
  res.T_est = fit_blowup_time(ht, hs, *cross1, cfg_.p);
  if (!res.T_est) {
    res.status = SimStatus::NumericalFailure;
    res.message = "too few samples in the last decade of growth";
    return res;
  }
  res.status = SimStatus::BlewUp;
  if (reached2) res.T_est_refined = fit_blowup_time(ht, hs, ht.size() - 1, cfg_.p);
  res.threshold_sensitivity = res.T_est_refined ? std::abs(*res.T_est - *res.T_est_refined) / *res.T_est_refined : kInf;
  return res;
}

inline SimResult run(const SimConfig& c) { return Simulator(c).run(); }

/// CSV t,F0,F1,supnorm.
inline void write_series_csv(std::ostream& out, const SimResult& r) {
  out << "t,F0,F1,supnorm\n";
  for (const auto& s : r.series) out << fmt17(s.t) << ',' << fmt17(s.F0) << ',' << fmt17(s.F1) << ',' << fmt17(s.sup) << '\n';
}

}  // namespace blowuplab::pde
