#pragma once

// eps sweeps: run one simulation per eps, fit ln T against ln eps and compare
// with the lifespan law of the matching classifier.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "blowuplab/classify.hpp"
#include "blowuplab/errors.hpp"
#include "blowuplab/fit.hpp"
#include "blowuplab/io.hpp"
#include "blowuplab/pde/config.hpp"
#include "blowuplab/pde/solver.hpp"

namespace blowuplab::pde {

struct SweepOptions {
  double tolerance = 0.2;
  double t_max_factor = 4.0;  // later runs get t_max = factor * predicted lifespan
  int threads = 0;            // 0: BLOWUPLAB_THREADS, else hardware concurrency
  std::optional<LifespanLaw> law;  // fit target override, e.g. for Laplacian-free self-tests
};

struct SweepFit {
  std::vector<double> eps_list;
  std::vector<double> T_list;  // NaN where the run did not blow up
  std::vector<SimStatus> statuses;
  double slope = 0.0;            // ln T against ln eps
  double stderr_slope = 0.0;
  double corrected_slope = 0.0;  // ln T + (c/beta) ln ln(1+T) against ln eps
  double predicted_exponent = 0.0;  // T ~ eps^{-predicted_exponent}
  LifespanLaw law;
  Regime regime;
  double tolerance = 0.2;
  bool partial = false;   // some run did not blow up
  bool monotone = true;   // T strictly increasing as eps decreases
  bool pass = false;
};

/// Threads for sweeps: explicit request, then BLOWUPLAB_THREADS, then the hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BLOWUPLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw validation_error(std::string("BLOWUPLAB_THREADS must be a positive integer: ") + env);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// eps0, eps0/ratio, ... (count values).
inline std::vector<double> geometric_eps(double eps0, double ratio, int count) {
  if (!(eps0 > 0) || !(ratio > 1) || count < 1) throw validation_error("need eps0 > 0, ratio > 1, count >= 1");
  std::vector<double> e(count);
  for (int i = 0; i < count; ++i) e[i] = eps0 / std::pow(ratio, i);
  return e;
}

/// The classifier verdict that supplies the fit target.
inline Regime sweep_regime(const SimConfig& c) {
  if (c.model.kind == ModelKind::Scattering) return classify_negmass(c.model.scattering(), c.p);
  if (c.data.data_class == DataClass::HZero) return classify_h0(c.model.n, c.model.mu1, c.model.mu2, c.p);
  return classify_thm1(c.model.n, c.model.mu1, c.model.mu2, c.p, true);
}

inline void check_eps_grid(const std::vector<double>& eps) {
  if (eps.size() < 4) throw validation_error("a sweep needs at least 4 eps values");
  for (double e : eps)
    if (!(e > 0) || !std::isfinite(e)) throw validation_error("eps values must be positive");
  const double ratio = eps[0] / eps[1];
  if (!(ratio > 1)) throw validation_error("eps values must be decreasing");
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (std::abs(eps[i - 1] / eps[i] / ratio - 1.0) > 1e-6) throw validation_error("eps grid must be geometric");
}

inline SweepFit sweep(const SimConfig& base, const std::vector<double>& eps, const SweepOptions& opt = {}) {
  base.validate();
  check_eps_grid(eps);
  SweepFit fit;
  fit.regime = sweep_regime(base);
  if (opt.law) fit.regime.law = opt.law;
  if (!fit.regime.blows_up || !fit.regime.law) throw unsupported_regime("no blow-up lifespan law for this configuration");
  fit.law = *fit.regime.law;
  fit.predicted_exponent = fit.law.exponent();
  fit.tolerance = opt.tolerance;
  fit.eps_list = eps;

  const std::size_t K = eps.size();
  std::vector<SimResult> results(K);
  auto config_for = [&](std::size_t k, double t_max) {
    SimConfig c = base;
    c.eps = eps[k];
    c.stopping.t_max = t_max;
    if (c.model.laplacian) {
      const double need = t_max + c.data.R;
      if (c.grid.r_max < need) c.grid.r_max = std::ceil(need / c.grid.dr - 1e-9) * c.grid.dr;
    }
    return c;
  };
  results[0] = run(config_for(0, base.stopping.t_max));
  // t_max for the rest: anchored on the first measured time and the predicted exponent
  std::vector<double> t_max(K, base.stopping.t_max);
  if (results[0].T_est)
    for (std::size_t k = 1; k < K; ++k)
      t_max[k] = std::max(base.stopping.t_max,
                          opt.t_max_factor * *results[0].T_est * std::pow(eps[0] / eps[k], fit.predicted_exponent));

  const int nthreads = std::max(1, std::min<int>(resolve_threads(opt.threads), static_cast<int>(K - 1)));
  std::atomic<std::size_t> next{1};
  std::vector<std::string> errors(K);
  auto worker = [&] {
    for (std::size_t k = next++; k < K; k = next++) {
      try {
        results[k] = run(config_for(k, t_max[k]));
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t k = 1; k < K; ++k)
    if (!errors[k].empty()) throw numerical_failure("sweep run eps = " + fmt17(eps[k]) + ": " + errors[k]);

  std::vector<double> x, y, yc;
  for (std::size_t k = 0; k < K; ++k) {
    fit.statuses.push_back(results[k].status);
    const double T = results[k].T_est ? *results[k].T_est : NAN;
    fit.T_list.push_back(T);
    if (!results[k].T_est) {
      fit.partial = true;
      continue;
    }
    x.push_back(std::log(eps[k]));
    y.push_back(std::log(T));
    double corr = std::log(T);
    if (fit.law.log_power != 0.0) corr += fit.law.log_power / fit.law.t_exponent * std::log(std::log1p(T));
    yc.push_back(corr);
  }
  for (std::size_t k = 1; k < K; ++k)
    if (!(fit.T_list[k] > fit.T_list[k - 1])) fit.monotone = false;
  if (x.size() >= 2) {
    const auto f = linear_fit(x, y);
    fit.slope = f.slope;
    fit.stderr_slope = f.stderr_slope;
    fit.corrected_slope = linear_fit(x, yc).slope;
  }
  fit.pass = !fit.partial && std::abs(fit.corrected_slope + fit.predicted_exponent) <= opt.tolerance;
  return fit;
}

inline void write_sweep_csv(std::ostream& out, const SweepFit& f) {
  out << "eps,T_est\n";
  for (std::size_t k = 0; k < f.eps_list.size(); ++k) out << fmt17(f.eps_list[k]) << ',' << fmt17(f.T_list[k]) << '\n';
}

inline json to_json(const SweepFit& f) {
  json T = json::array(), st = json::array();
  for (double t : f.T_list) T.push_back(std::isnan(t) ? json(nullptr) : json(t));
  for (auto s : f.statuses) st.push_back(to_string(s));
  return json{{"slope", f.slope},
              {"stderr", f.stderr_slope},
              {"corrected_slope", f.corrected_slope},
              {"predicted", -f.predicted_exponent},
              {"predicted_exponent", f.predicted_exponent},
              {"tolerance", f.tolerance},
              {"pass", f.pass},
              {"partial", f.partial},
              {"monotone", f.monotone},
              {"law", blowuplab::to_json(f.law)},
              {"branch", to_string(f.regime.branch)},
              {"eps", f.eps_list},
              {"T_est", T},
              {"status", st}};
}

}  // namespace blowuplab::pde
