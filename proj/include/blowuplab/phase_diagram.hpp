#pragma once

// Region maps in the (p, mu) or (p, sqrt(delta)) plane.
//
// For the delta families ("thm1", "h0", "negmass") the second coordinate is
// sqrt(delta) and mu1 is held fixed (mu1 = 0 for negmass); the CSV column is
// still called "mu".

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "blowuplab/classify.hpp"
#include "blowuplab/errors.hpp"
#include "blowuplab/exponents.hpp"
#include "blowuplab/io.hpp"

namespace blowuplab {

struct PhaseCell {
  double p = 0.0;
  double mu = 0.0;
  Regime regime;
};

struct Polyline {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (p, mu)
};

struct PhaseDiagram {
  int n = 1;
  std::string theorem;
  std::pair<double, double> p_range;
  std::pair<double, double> mu_range;
  int resolution = 0;
  std::vector<PhaseCell> cells;  // row-major, mu outer, p inner
  std::vector<Polyline> curves;
};

inline const std::vector<std::string>& phase_theorems() {
  static const std::vector<std::string> ids{"cor1", "cor2", "thm1", "h0", "negmass"};
  return ids;
}

/// Classifier for one point of the given family.
inline std::function<Regime(double, double)> phase_classifier(int n, const std::string& theorem,
                                                              double mu1 = 0.0) {
  // mu2 that realizes sqrt(delta) = s at fixed mu1.
  auto mu2_for = [mu1](double s) { return ((mu1 - 1.0) * (mu1 - 1.0) - s * s) / 4.0; };
  if (theorem == "cor1") return [n](double p, double mu) { return classify_cor1(n, mu, p); };
  if (theorem == "cor2") return [n](double p, double mu) { return classify_cor2(n, mu, p); };
  if (theorem == "thm1")
    return [n, mu1, mu2_for](double p, double s) { return classify_thm1(n, mu1, mu2_for(s), p); };
  if (theorem == "h0")
    return [n, mu1, mu2_for](double p, double s) { return classify_h0(n, mu1, mu2_for(s), p); };
  if (theorem == "negmass")
    return [n](double p, double s) {
      // sqrt(delta) <= 1 is not reachable with nu2 < 0; there the map shows the
      // mu1 = 0 member of the h > 0 family, which continues it.
      if (s <= 1.0) return classify_thm1(n, 0.0, (1.0 - s * s) / 4.0, p);
      return classify_negmass(ScatteringParams{n, 0.0, (1.0 - s * s) / 4.0, 2.0}, p);
    };
  throw validation_error("unknown theorem id: " + theorem);
}

namespace detail {

inline void add_curve(std::vector<Polyline>& out, std::string name, int samples, double lo,
                      double hi, const std::function<std::pair<double, double>(double)>& at,
                      const std::function<bool(double)>& keep = {}) {
  Polyline line{std::move(name), {}};
  for (int i = 0; i < samples; ++i) {
    const double y = lo + (hi - lo) * i / (samples - 1);
    if (keep && !keep(y)) continue;
    const auto pt = at(y);
    if (std::isfinite(pt.first) && std::isfinite(pt.second)) line.points.push_back(pt);
  }
  out.push_back(std::move(line));
}

}  // namespace detail

/// Boundary curves of the family, sampled along the mu axis (horizontal lines
/// along the p axis).
inline std::vector<Polyline> phase_boundaries(int n, const std::string& theorem,
                                              std::pair<double, double> p_range,
                                              std::pair<double, double> mu_range, int samples,
                                              double mu1 = 0.0) {
  std::vector<Polyline> c;
  const auto [plo, phi] = p_range;
  const auto [ylo, yhi] = mu_range;
  auto vertical = [&](std::string name, std::function<double(double)> p_of,
                      std::function<bool(double)> keep = {}) {
    detail::add_curve(c, std::move(name), samples, ylo, yhi,
                      [p_of](double y) { return std::pair{p_of(y), y}; }, keep);
  };
  auto horizontal = [&](std::string name, double y) {
    if (y < ylo || y > yhi) return;
    detail::add_curve(c, std::move(name), samples, plo, phi,
                      [y](double p) { return std::pair{p, y}; });
  };

  if (theorem == "cor1" || theorem == "cor2") {
    const double ms = mu_star(n);
    vertical("strauss", [n](double mu) { return strauss_exponent(n + mu); });
    if (theorem == "cor1") {
      vertical("fujita", [n](double mu) { return fujita_exponent(n - negative_part(mu - 1.0)); });
      vertical("transition", [n](double mu) { return transition_exponent(n, std::abs(mu - 1.0)); },
               [ms](double mu) { return mu < ms; });
      horizontal("mu_star", ms);
    } else {
      vertical("fujita", [n](double) { return fujita_exponent(n); });
      vertical("p_star", [n](double mu) { return 1.0 + (n - mu + 3.0) / (n + mu - 1.0); },
               [ms, n](double mu) { return mu > ms && mu < n + 3.0; });
      horizontal("mu_star", ms);
      horizontal("n_plus_3", n + 3.0);
      if (n == 1)
        vertical("improved_1d", [](double mu) { return 2.0 / (1.0 + std::abs(mu - 1.0)); },
                 [](double mu) { return mu > 0 && mu < 2; });
    }
    return c;
  }
  if (theorem == "thm1" || theorem == "h0" || theorem == "negmass") {
    const double m1 = theorem == "negmass" ? 0.0 : mu1;
    const double ds = critical_offset(n + m1);
    vertical("strauss", [n, m1](double) { return strauss_exponent(n + m1); });
    vertical("fujita", [n, m1](double s) { return fujita_exponent(n + (m1 - 1.0 - s) / 2.0); });
    horizontal("d_star_line", n - ds);
    if (theorem == "h0") {
      vertical("p_star", [n, m1](double s) { return p_star(n, m1, s); },
               [n, ds](double s) { return s > n - ds && s < n + 2.0; });
      horizontal("n_plus_2", n + 2.0);
      if (n == 1)
        vertical("r_star", [m1](double s) { return r_star(m1, s); },
                 [](double s) { return s >= 0 && s < 1.0; });
    } else {
      vertical("transition", [n](double s) { return transition_exponent(n, s); },
               [n, ds](double s) { return s > n - 2.0 && s < n - ds; });
      horizontal("n_minus_2", n - 2.0);
    }
    return c;
  }
  throw validation_error("unknown theorem id: " + theorem);
}

inline PhaseDiagram phase_diagram(int n, const std::string& theorem,
                                  std::pair<double, double> p_range,
                                  std::pair<double, double> mu_range, int resolution,
                                  double mu1 = 0.0) {
  if (n < 1) throw validation_error("dimension n must be >= 1");
  if (resolution < 2) throw validation_error("resolution must be >= 2");
  if (!(p_range.first >= 1) || !(p_range.second > p_range.first))
    throw validation_error("p range must satisfy 1 <= p_lo < p_hi");
  if (!(mu_range.first >= 0) || !(mu_range.second > mu_range.first))
    throw validation_error("mu range must satisfy 0 <= mu_lo < mu_hi");
  const auto classify = phase_classifier(n, theorem, mu1);

  PhaseDiagram d{n, theorem, p_range, mu_range, resolution, {}, {}};
  d.cells.reserve(static_cast<std::size_t>(resolution) * resolution);
  const double dp = (p_range.second - p_range.first) / resolution;
  const double dm = (mu_range.second - mu_range.first) / resolution;
  for (int j = 0; j < resolution; ++j) {
    const double mu = mu_range.first + (j + 0.5) * dm;
    for (int i = 0; i < resolution; ++i) {
      const double p = p_range.first + (i + 0.5) * dp;
      d.cells.push_back({p, mu, classify(p, mu)});
    }
  }
  d.curves = phase_boundaries(n, theorem, p_range, mu_range, resolution, mu1);
  return d;
}

inline void write_phase_csv(std::ostream& out, const PhaseDiagram& d) {
  out << "p,mu,branch,exponent,log_power\n";
  for (const auto& c : d.cells) {
    out << fmt17(c.p) << ',' << fmt17(c.mu) << ',' << to_string(c.regime.branch) << ',';
    if (c.regime.law) out << fmt17(c.regime.law->exponent()) << ',' << fmt17(c.regime.law->log_power);
    else out << ',';
    out << '\n';
  }
}

inline void write_boundary_csv(std::ostream& out, const PhaseDiagram& d) {
  out << "curve,p,mu\n";
  for (const auto& line : d.curves)
    for (const auto& [p, mu] : line.points)
      out << line.name << ',' << fmt17(p) << ',' << fmt17(mu) << '\n';
}

inline const char* branch_color(Branch b) {
  switch (b) {
    case Branch::SubWave: return "#9ecae1";
    case Branch::Transition: return "#fdae6b";
    case Branch::SubHeat: return "#fc9272";
    case Branch::Improved1D: return "#e6550d";
    case Branch::PStar: return "#756bb1";
    case Branch::Mixed: return "#bcbddc";
    case Branch::NoBlowup: return "#ffffff";
  }
  return "#000000";
}

/// Fixed 800x600 viewBox; cells as rectangles, boundaries as polylines.
inline void write_phase_svg(std::ostream& out, const PhaseDiagram& d) {
  const double W = 800, H = 600;
  const auto [plo, phi] = d.p_range;
  const auto [ylo, yhi] = d.mu_range;
  auto X = [&](double p) { return (p - plo) / (phi - plo) * W; };
  auto Y = [&](double y) { return H - (y - ylo) / (yhi - ylo) * H; };
  const double cw = W / d.resolution, ch = H / d.resolution;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" "
         "height=\"600\">\n";
  for (const auto& c : d.cells) {
    out << "<rect x=\"" << fmt17(X(c.p) - cw / 2) << "\" y=\"" << fmt17(Y(c.mu) - ch / 2)
        << "\" width=\"" << fmt17(cw) << "\" height=\"" << fmt17(ch) << "\" fill=\""
        << branch_color(c.regime.branch) << "\"/>\n";
  }
  for (const auto& line : d.curves) {
    if (line.points.size() < 2) continue;
    out << "<polyline fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\" data-curve=\""
        << line.name << "\" points=\"";
    for (const auto& [p, y] : line.points) {
      if (p < plo || p > phi) continue;
      out << fmt17(X(p)) << ',' << fmt17(Y(y)) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace blowuplab
