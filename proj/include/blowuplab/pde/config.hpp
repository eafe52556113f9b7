#pragma once

// Simulation configuration and its INI form:
//
//   [model]    kind, n, mu1, mu2, nu1, nu2, beta, p, laplacian, nonlinear
//   [data]     eps, shape, amplitude, support_radius, class, g_ratio
//   [grid]     dr, r_max, cfl, growth_cfl
//   [stopping] blowup_factor, t_max, sample_stride
//
// Every key has a default; unknown sections and keys are rejected.

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/io.hpp"

namespace blowuplab::pde {

enum class ModelKind { ScaleInvariant, Scattering };
enum class Shape { Bump, Poly, Flat };
enum class DataClass { HPositive, HZero, Custom };

inline const char* to_string(ModelKind k) { return k == ModelKind::ScaleInvariant ? "scale_invariant" : "scattering"; }
inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::Bump: return "bump";
    case Shape::Poly: return "poly";
    case Shape::Flat: return "flat";
  }
  return "?";
}
inline const char* to_string(DataClass c) {
  switch (c) {
    case DataClass::HPositive: return "h_positive";
    case DataClass::HZero: return "h_zero";
    case DataClass::Custom: return "custom";
  }
  return "?";
}

struct ModelSpec {
  ModelKind kind = ModelKind::ScaleInvariant;
  int n = 1;
  double mu1 = 0.0, mu2 = 0.0;              // scale-invariant
  double nu1 = 0.0, nu2 = -0.5, beta = 2.0;  // scattering
  bool laplacian = true;
  bool nonlinear = true;

  ModelParams scale_invariant() const { return {n, mu1, mu2}; }
  ScatteringParams scattering() const { return {n, nu1, nu2, beta}; }

  /// Damping coefficient a(t) in u_tt - Lap u + a u_t + b u = |u|^p.
  double damping(double t) const {
    return kind == ModelKind::ScaleInvariant ? mu1 / (1.0 + t) : nu1 / std::pow(1.0 + t, beta);
  }
  double mass(double t) const {
    return (kind == ModelKind::ScaleInvariant ? mu2 : nu2) / ((1.0 + t) * (1.0 + t));
  }

  /// delta of the model, or of its massless-damping equivalent for scattering.
  double delta() const {
    return kind == ModelKind::ScaleInvariant ? scale_invariant().delta() : scattering().delta();
  }

  /// The mu1 entering h = ((mu1 - 1 + sqrt(delta))/2) f + g; 0 for scattering.
  double h_mu1() const { return kind == ModelKind::ScaleInvariant ? mu1 : 0.0; }

  void validate() const {
    if (kind == ModelKind::ScaleInvariant) scale_invariant().validate();
    else scattering().validate();
  }
};

struct DataProfile {
  Shape shape = Shape::Bump;
  double amplitude = 1.0;
  double R = 1.0;  // support radius
  DataClass data_class = DataClass::HPositive;
  double g_ratio = 0.0;  // custom class: g = g_ratio * f
};

struct GridSpec {
  double dr = 0.01;
  double r_max = 12.0;
  double cfl = 0.5;
  double growth_cfl = 0.05;  // dt <= growth_cfl / max(1, sup|u|^{(p-1)/2})

  int cells() const { return static_cast<int>(std::lround(r_max / dr)); }
};

struct StoppingSpec {
  double blowup_factor = 1e6;
  double t_max = 10.0;
  int sample_stride = 1;
};

struct SimConfig {
  ModelSpec model;
  double p = 2.0;
  double eps = 0.1;
  DataProfile data;
  GridSpec grid;
  StoppingSpec stopping;

  void validate() const {
    model.validate();
    if (!(p > 1) || !std::isfinite(p)) throw validation_error("p must be > 1");
    if (!(eps >= 0) || !std::isfinite(eps)) throw validation_error("eps must be >= 0");
    if (!(data.amplitude > 0)) throw validation_error("data amplitude must be > 0");
    if (!(data.R >= 1) || !std::isfinite(data.R)) throw validation_error("support_radius must be >= 1");
    if (!std::isfinite(data.g_ratio)) throw validation_error("g_ratio must be finite");
    if (!(grid.dr > 0) || !(grid.r_max > 0)) throw validation_error("dr and r_max must be > 0");
    if (!(grid.cfl > 0 && grid.cfl < 1)) throw validation_error("cfl must lie in (0, 1)");
    if (!(grid.growth_cfl > 0 && grid.growth_cfl <= 1)) throw validation_error("growth_cfl must lie in (0, 1]");
    const double k = grid.r_max / grid.dr;
    if (std::abs(k - std::round(k)) > 1e-9 * k || k < 2) throw validation_error("dr must divide r_max");
    if (!(stopping.blowup_factor > 1)) throw validation_error("blowup_factor must be > 1");
    if (!(stopping.t_max > 0) || !std::isfinite(stopping.t_max)) throw validation_error("t_max must be > 0");
    if (stopping.sample_stride < 1) throw validation_error("sample_stride must be >= 1");
    if (data.shape == Shape::Flat && model.laplacian)
      throw validation_error("flat data has no compact support; set laplacian = false");
    if (model.laplacian && grid.r_max < stopping.t_max + data.R)
      throw validation_error("r_max must be >= t_max + support_radius (finite speed of propagation)");
    if (data.data_class != DataClass::Custom && model.delta() < -kDeltaTolerance)
      throw unsupported_regime("h data classes need delta >= 0");
  }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw validation_error("bad number for " + key + ": " + v);
  }
  if (pos != v.size()) throw validation_error("bad number for " + key + ": " + v);
  return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw validation_error("expected an integer for " + key + ": " + v);
  return static_cast<int>(x);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw validation_error("expected a boolean for " + key + ": " + v);
}

}  // namespace detail

/// Sets "section.key" from its text form.
inline void set_option(SimConfig& c, const std::string& dotted, const std::string& value) {
  using namespace detail;
  const std::string& k = dotted;
  auto d = [&] { return parse_double(k, value); };
  if (k == "model.kind") {
    if (value == "scale_invariant") c.model.kind = ModelKind::ScaleInvariant;
    else if (value == "scattering") c.model.kind = ModelKind::Scattering;
    else throw validation_error("model.kind must be scale_invariant or scattering");
  } else if (k == "model.n") c.model.n = parse_int(k, value);
  else if (k == "model.mu1") c.model.mu1 = d();
  else if (k == "model.mu2") c.model.mu2 = d();
  else if (k == "model.nu1") c.model.nu1 = d();
  else if (k == "model.nu2") c.model.nu2 = d();
  else if (k == "model.beta") c.model.beta = d();
  else if (k == "model.p") c.p = d();
  else if (k == "model.laplacian") c.model.laplacian = parse_bool(k, value);
  else if (k == "model.nonlinear") c.model.nonlinear = parse_bool(k, value);
  else if (k == "data.eps") c.eps = d();
  else if (k == "data.shape") {
    if (value == "bump") c.data.shape = Shape::Bump;
    else if (value == "poly") c.data.shape = Shape::Poly;
    else if (value == "flat") c.data.shape = Shape::Flat;
    else throw validation_error("data.shape must be bump, poly or flat");
  } else if (k == "data.amplitude") c.data.amplitude = d();
  else if (k == "data.support_radius") c.data.R = d();
  else if (k == "data.class") {
    if (value == "h_positive") c.data.data_class = DataClass::HPositive;
    else if (value == "h_zero") c.data.data_class = DataClass::HZero;
    else if (value == "custom") c.data.data_class = DataClass::Custom;
    else throw validation_error("data.class must be h_positive, h_zero or custom");
  } else if (k == "data.g_ratio") c.data.g_ratio = d();
  else if (k == "grid.dr") c.grid.dr = d();
  else if (k == "grid.r_max") c.grid.r_max = d();
  else if (k == "grid.cfl") c.grid.cfl = d();
  else if (k == "grid.growth_cfl") c.grid.growth_cfl = d();
  else if (k == "stopping.blowup_factor") c.stopping.blowup_factor = d();
  else if (k == "stopping.t_max") c.stopping.t_max = d();
  else if (k == "stopping.sample_stride") c.stopping.sample_stride = parse_int(k, value);
  else throw validation_error("unknown config key: " + k);
}

/// Parses an INI stream over the defaults and validates the result.
inline SimConfig parse_config(std::istream& in, SimConfig base = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw validation_error(std::string("config parse error: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (section != "model" && section != "data" && section != "grid" && section != "stopping")
      throw validation_error("unknown config section: " + section);
    if (body.empty() && !body.data().empty()) throw validation_error("key outside a section: " + section);
    for (const auto& [key, value] : body) set_option(base, section + "." + key, value.data());
  }
  base.validate();
  return base;
}

inline SimConfig parse_config_string(const std::string& text, SimConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline SimConfig load_config(const std::string& path, SimConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot read config " + path);
  return parse_config(in, std::move(base));
}

inline void write_config(std::ostream& out, const SimConfig& c) {
  out << "[model]\nkind = " << to_string(c.model.kind) << "\nn = " << c.model.n << "\nmu1 = " << fmt17(c.model.mu1)
      << "\nmu2 = " << fmt17(c.model.mu2) << "\nnu1 = " << fmt17(c.model.nu1) << "\nnu2 = " << fmt17(c.model.nu2)
      << "\nbeta = " << fmt17(c.model.beta) << "\np = " << fmt17(c.p)
      << "\nlaplacian = " << (c.model.laplacian ? "true" : "false")
      << "\nnonlinear = " << (c.model.nonlinear ? "true" : "false") << "\n\n";
  out << "[data]\neps = " << fmt17(c.eps) << "\nshape = " << to_string(c.data.shape)
      << "\namplitude = " << fmt17(c.data.amplitude) << "\nsupport_radius = " << fmt17(c.data.R)
      << "\nclass = " << to_string(c.data.data_class) << "\ng_ratio = " << fmt17(c.data.g_ratio) << "\n\n";
  out << "[grid]\ndr = " << fmt17(c.grid.dr) << "\nr_max = " << fmt17(c.grid.r_max) << "\ncfl = " << fmt17(c.grid.cfl)
      << "\ngrowth_cfl = " << fmt17(c.grid.growth_cfl) << "\n\n";
  out << "[stopping]\nblowup_factor = " << fmt17(c.stopping.blowup_factor) << "\nt_max = " << fmt17(c.stopping.t_max)
      << "\nsample_stride = " << c.stopping.sample_stride << "\n";
}

}  // namespace blowuplab::pde
