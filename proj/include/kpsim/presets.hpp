#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kpsim/config.hpp"
#include "kpsim/solutions.hpp"

namespace kpsim {

namespace detail {

inline RunConfig base(std::string name, int epsilon, double lx, double ly, std::size_t nx, std::size_t ny,
                      double t_final, std::size_t nt) {
  RunConfig c;
  c.preset = std::move(name);
  c.params.epsilon = epsilon;
  c.lx = lx, c.ly = ly, c.nx = nx, c.ny = ny;
  c.t_final = t_final, c.nt = nt;
  return c;
}

inline std::vector<double> evenly(double t_final, int pieces) {
  std::vector<double> v;
  for (int k = 0; k < pieces; ++k) v.push_back(t_final * k / pieces);
  v.push_back(t_final);
  return v;
}

// 12 sech^2(x - x0): the c = 4 line soliton of the p = 1 equations.
inline InitialTerm line_soliton(double x0) { return {"sech2", {{"A", 12.0}, {"c", 4.0}, {"x0", x0}}}; }

inline RunConfig soliton_propagation(int eps) {
  auto c = base(eps > 0 ? "soliton-propagation" : "soliton-propagation-kp1", eps, 8, 8, 256, 1024, 6.0, 3200);
  c.initial = {line_soliton(-2 * 8.0)};
  c.snapshot_times = evenly(6.0, 3);
  return c;
}

// line soliton at -2 Lx plus sign * (pert) centred at x1
inline RunConfig perturbed_soliton(std::string name, int eps, double lx, double x1, int sign, std::size_t nx,
                                   std::size_t ny, double t_final, std::size_t nt) {
  auto c = base(std::move(name), eps, lx, 8, nx, ny, t_final, nt);
  c.initial = {line_soliton(-2 * lx), {"perturbation_pair", {{"x1", x1}, {"sign", static_cast<double>(sign)}}}};
  c.snapshot_times = evenly(t_final, 4);
  return c;
}

inline RunConfig zaitsev_run(std::string name, double scale, double lx, double ly, std::size_t nx, std::size_t ny,
                             double t_final, std::size_t nt) {
  auto c = base(std::move(name), -1, lx, ly, nx, ny, t_final, nt);
  c.initial = {{"zaitsev", {{"alpha", 1.0}, {"beta", 0.5}, {"x0", -lx / 2}, {"scale", scale}}}};
  c.snapshot_times = evenly(t_final, 4);
  return c;
}

inline RunConfig gaussian_run(std::string name, Rational p, int eps, double alpha, double amplitude, std::size_t nx,
                              std::size_t ny, double t_final, std::size_t nt) {
  auto c = base(std::move(name), eps, 5, 2, nx, ny, t_final, nt);
  c.params.p = p;
  c.initial = {{"gaussian_dxx", {{"alpha", alpha}, {"amplitude", amplitude}}}};
  c.snapshot_times = evenly(t_final, 3);
  c.cadence = 5;
  return c;
}

inline const std::map<std::string, std::function<RunConfig()>>& preset_table() {
  static const std::map<std::string, std::function<RunConfig()>> table = [] {
    std::map<std::string, std::function<RunConfig()>> t;
    t["soliton-propagation"] = [] { return soliton_propagation(+1); };
    t["soliton-propagation-kp1"] = [] { return soliton_propagation(-1); };

    // KP II: soliton with offset and aligned perturbations, deformed soliton
    t["kp2-perturbed-offset"] = [] { return perturbed_soliton("kp2-perturbed-offset", +1, 8, -8, -1, 256, 1024, 6, 3200); };
    t["kp2-perturbed-aligned"] = [] { return perturbed_soliton("kp2-perturbed-aligned", +1, 8, -16, -1, 256, 1024, 6, 3200); };
    t["kp2-perturbed-aligned-long"] = [] {
      return perturbed_soliton("kp2-perturbed-aligned-long", +1, 8, -16, -1, 256, 1024, 16, 8533);
    };
    t["kp2-deformed"] = [] {
      auto c = base("kp2-deformed", +1, 16, 8, 1024, 128, 6, 6400);
      c.initial = {{"deformed_soliton", {{"A", 12.0}, {"shift", 0.4}}}};
      c.snapshot_times = evenly(6, 4);
      return c;
    };

    // KP I: lump emergence, sign flip, deformed soliton, meta-stability
    t["kp1-perturbed-aligned"] = [] { return perturbed_soliton("kp1-perturbed-aligned", -1, 8, -16, +1, 512, 1024, 6, 6400); };
    t["kp1-perturbed-aligned-flipped"] = [] {
      return perturbed_soliton("kp1-perturbed-aligned-flipped", -1, 8, -16, -1, 512, 1024, 6, 6400);
    };
    t["kp1-deformed"] = [] {
      auto c = base("kp1-deformed", -1, 16, 8, 2048, 2048, 6, 10000);
      c.initial = {{"deformed_soliton", {{"A", 12.0}, {"shift", 0.4}}}};
      c.snapshot_times = evenly(6, 4);
      return c;
    };
    t["kp1-perturbed-offset"] = [] { return perturbed_soliton("kp1-perturbed-offset", -1, 8, -8, +1, 512, 1024, 10, 6400); };
    t["kp1-perturbed-offset-lx10"] = [] {
      auto c = perturbed_soliton("kp1-perturbed-offset-lx10", -1, 10, -10, +1, 512, 1024, 10, 6400);
      return c;
    };
    t["kp1-perturbed-offset-ly10"] = [] {
      auto c = perturbed_soliton("kp1-perturbed-offset-ly10", -1, 8, -8, +1, 512, 1024, 10, 6400);
      c.ly = 10;
      return c;
    };

    // Zaitsev wave (alpha = 1, beta = 0.5) and its perturbations, Ly = 5 / delta
    t["kp1-soliton-zaitsev"] = [] {
      const double ly = 5.0 / zaitsev_transverse_wavenumber(1.0, 0.5);
      auto c = base("kp1-soliton-zaitsev", -1, 10, ly, 512, 256, 10, 10000);
      c.initial = {{"sech2", {{"A", 12.0}, {"c", 4.0}, {"x0", -10.0}}},
                   {"zaitsev", {{"alpha", 1.0}, {"beta", 0.5}, {"x0", -10.0}, {"scale", 0.1}}}};
      c.snapshot_times = evenly(10, 5);
      return c;
    };
    const auto ly5 = [] { return 5.0 / zaitsev_transverse_wavenumber(1.0, 0.5); };
    t["zaitsev-perturbed"] = [ly5] {
      auto c = zaitsev_run("zaitsev-perturbed", 1.0, 10, ly5(), 512, 256, 4, 10000);
      c.initial.push_back({"odd_bump", {{"amplitude", 6.0}, {"x1", -5.0}, {"y1", 0.0}}});
      return c;
    };
    t["zaitsev-perturbed-flipped"] = [ly5] {
      auto c = zaitsev_run("zaitsev-perturbed-flipped", 1.0, 10, ly5(), 512, 256, 4, 10000);
      c.initial.push_back({"odd_bump", {{"amplitude", -6.0}, {"x1", -5.0}, {"y1", 0.0}}});
      return c;
    };
    t["zaitsev-displaced"] = [ly5] {
      auto c = zaitsev_run("zaitsev-displaced", 1.0, 10, ly5(), 512, 256, 4, 10000);
      c.initial.push_back({"odd_bump", {{"amplitude", 6.0}, {"x1", 0.0}, {"y1", 0.0}}});
      return c;
    };
    t["zaitsev-amplified"] = [ly5] { return zaitsev_run("zaitsev-amplified", 1.1, 10, ly5(), 512, 256, 4, 10000); };
    t["zaitsev-reduced"] = [] { return zaitsev_run("zaitsev-reduced", 0.9, 30, 2.5, 2048, 512, 10, 20000); };
    t["zaitsev-reduced-small-ly"] = [] {
      return zaitsev_run("zaitsev-reduced-small-ly", 0.9, 30, 1.5, 2048, 256, 10, 20000);
    };

    // generalized KP: blow-up and its absence
    t["blowup-p2"] = [] { return gaussian_run("blowup-p2", {2, 1}, -1, 1.0, 6.0, 2048, 8192, 0.06, 5000); };
    t["blowup-p2-reduced"] = [] { return gaussian_run("blowup-p2-reduced", {2, 1}, -1, 1.0, 6.0, 512, 1024, 0.06, 2500); };
    t["kp2-p2"] = [] { return gaussian_run("kp2-p2", {2, 1}, +1, 1.0, 6.0, 512, 1024, 0.06, 2500); };
    t["subcritical-p1"] = [] { return gaussian_run("subcritical-p1", {1, 1}, -1, 1.0, 12.0, 1024, 256, 0.15, 1000); };
    t["critical-p43"] = [] { return gaussian_run("critical-p43", {4, 3}, -1, 4.0, 6.0, 1024, 256, 0.05, 1000); };
    return t;
  }();
  return table;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : detail::preset_table()) names.push_back(k);
  return names;
}

inline bool has_preset(const std::string& name) { return detail::preset_table().contains(name); }

inline RunConfig preset(const std::string& name) {
  auto it = detail::preset_table().find(name);
  if (it == detail::preset_table().end()) throw ConfigError("unknown preset '" + name + "'");
  RunConfig c = it->second();
  c.validate();
  return c;
}

}  // namespace kpsim
