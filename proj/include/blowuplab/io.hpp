#pragma once

// Output helpers shared by the CLI and the tests: 17-digit CSV numbers and
// JSON encodings that re-parse into the originating values.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "blowuplab/classify.hpp"
#include "blowuplab/errors.hpp"
#include "blowuplab/lifespan.hpp"

namespace blowuplab {

using json = nlohmann::json;

/// %.17g, with "inf"/"-inf"/"nan" spelled out.
inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Extended reals: finite values as numbers, infinities as the strings "+inf"/"-inf".
inline json ext_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  return x;
}

inline double ext_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw validation_error("bad extended real: " + s);
  }
  return j.get<double>();
}

inline json to_json(const LifespanLaw& law) {
  return json{{"eps_power", law.eps_power},
              {"t_exponent", law.t_exponent},
              {"log_power", law.log_power},
              {"tag", std::string(to_string(law.tag))},
              {"exponent", law.exponent()}};
}

inline LifespanLaw law_from_json(const json& j) {
  return LifespanLaw{j.at("eps_power").get<double>(), j.at("t_exponent").get<double>(),
                     j.at("log_power").get<double>(),
                     law_tag_from_string(j.at("tag").get<std::string>())};
}

inline json to_json(const Regime& r) {
  json j{{"blows_up", r.blows_up},
         {"p_crit", ext_to_json(r.p_crit)},
         {"branch", std::string(to_string(r.branch))},
         {"q", r.q}};
  j["law"] = r.law ? to_json(*r.law) : json(nullptr);
  return j;
}

inline Regime regime_from_json(const json& j) {
  Regime r;
  r.blows_up = j.at("blows_up").get<bool>();
  r.p_crit = ext_from_json(j.at("p_crit"));
  r.branch = branch_from_string(j.at("branch").get<std::string>());
  r.q = j.at("q").get<double>();
  if (!j.at("law").is_null()) r.law = law_from_json(j.at("law"));
  return r;
}

/// Opens a file for writing or throws validation_error (exit code 2 in the CLI).
inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw validation_error("cannot write to " + path);
  return out;
}

}  // namespace blowuplab
