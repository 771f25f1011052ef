#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpsim/presets.hpp"
#include "kpsim/runner.hpp"

namespace kpsim {

/// One measured quantity compared against a pinned limit.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", ">", "in [a, b]", "=="
  std::string limit;
  bool passed = false;
};

struct CriterionResult {
  int number = 0;
  std::string title;
  std::vector<Check> checks;
  nlohmann::json metrics = nlohmann::json::object();
  double seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
  std::string line() const;
};

struct VerifyReport {
  std::string suite;
  std::vector<CriterionResult> results;

  bool passed() const {
    for (const auto& r : results)
      if (!r.passed()) return false;
    return true;
  }
  nlohmann::json to_json() const;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

inline Check at_most(std::string name, double v, double limit) { return {std::move(name), v, "<=", num(limit), v <= limit}; }
inline Check above(std::string name, double v, double limit) { return {std::move(name), v, ">", num(limit), v > limit}; }
inline Check within(std::string name, double v, double lo, double hi) {
  return {std::move(name), v, "in", "[" + num(lo) + ", " + num(hi) + "]", v >= lo && v <= hi};
}
inline Check holds(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, "==", "1", ok}; }

/// Decreasing trend: the last value is below the first and the least-squares
/// slope is negative. Grid maxima jitter by a few ulps of the step, so a
/// step-by-step test would reject smooth decay.
inline bool decreasing_trend(const std::vector<double>& t, const std::vector<double>& v) {
  if (v.size() < 2) return false;
  double mt = 0, mv = 0;
  for (std::size_t k = 0; k < v.size(); ++k) mt += t[k], mv += v[k];
  mt /= v.size(), mv /= v.size();
  double num = 0, den = 0;
  for (std::size_t k = 0; k < v.size(); ++k) num += (t[k] - mt) * (v[k] - mv), den += (t[k] - mt) * (t[k] - mt);
  return v.back() < v.front() && num / den < 0.0;
}

inline bool nondecreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] < v[k - 1]) return false;
  return v.size() >= 2;
}

struct Series {
  std::vector<double> t, linf, l2_uy;
};

inline Series series(const std::vector<DiagnosticsRecord>& recs, double t_from) {
  Series s;
  for (const auto& r : recs)
    if (r.t >= t_from) s.t.push_back(r.t), s.linf.push_back(r.linf), s.l2_uy.push_back(r.l2_uy);
  return s;
}

inline Field final_physical(const GridPtr& g, const StepState& s) { return to_physical(Field::from_spectral(g, s.u_hat)); }

}  // namespace detail

inline std::string CriterionResult::line() const {
  std::ostringstream os;
  os << "criterion " << number << "  " << (passed() ? "PASS" : "FAIL") << "  " << title << ":";
  for (std::size_t k = 0; k < checks.size(); ++k) {
    const auto& c = checks[k];
    os << (k ? ";" : "") << ' ' << c.name << '=' << detail::num(c.value) << ' ' << c.relation << ' ' << c.limit
       << (c.passed ? "" : " (failed)");
  }
  os << "  [" << std::fixed << std::setprecision(1) << seconds << " s]";
  return os.str();
}

inline nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["passed"] = passed();
  auto arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json cj{{"criterion", r.number}, {"title", r.title}, {"passed", r.passed()}, {"seconds", r.seconds}};
    auto checks = nlohmann::json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"limit", c.limit},
                        {"passed", c.passed}});
    cj["checks"] = checks;
    cj["metrics"] = r.metrics;
    arr.push_back(cj);
  }
  j["criteria"] = arr;
  return j;
}

/// Runs acceptance experiments and collects the results. Every run made by
/// a verifier also feeds the constraint check of criterion 7.
class Verifier {
 public:
  explicit Verifier(std::ostream* log = nullptr) : log_(log) {}

  // 1. line soliton, both signs of epsilon
  CriterionResult soliton_propagation() {
    return timed(1, "soliton propagation", [&](CriterionResult& r) {
      for (const char* name : {"soliton-propagation", "soliton-propagation-kp1"}) {
        const RunConfig cfg = preset(name);
        const RunResult run = execute(cfg);
        const auto g = make_grid(cfg.lx, cfg.ly, cfg.nx, cfg.ny);
        const Field exact = a_sech2(g, 12.0, 4.0, -2 * cfg.lx + 4.0 * cfg.t_final);
        const double err = max_abs(*run.final_field + (-exact));
        const std::string tag = cfg.params.epsilon > 0 ? "kp2" : "kp1";
        r.checks.push_back(detail::holds(tag + "_completed", !run.stop));
        r.checks.push_back(detail::at_most(tag + "_delta", run.records.back().delta, 1e-6));
        r.checks.push_back(detail::at_most(tag + "_linf_error", err, 1e-5));
        r.metrics[tag] = {{"delta", run.records.back().delta}, {"linf_error", err}, {"wall_s", run.wall_time}};
      }
    });
  }

  // 2. perturbed KP II soliton
  CriterionResult perturbed_mass() {
    return timed(2, "perturbed-soliton mass control", [&](CriterionResult& r) {
      const RunResult run = execute(preset("kp2-perturbed-aligned"));
      r.checks.push_back(detail::holds("completed", !run.stop));
      r.checks.push_back(detail::at_most("delta", run.records.back().delta, 1e-6));
      r.metrics = {{"delta", run.records.back().delta}, {"t", run.records.back().t}};
    });
  }

  // 3. p = 2 blow-up at reduced resolution
  CriterionResult blowup_time() {
    return timed(3, "blow-up time (reduced resolution)", [&](CriterionResult& r) {
      const RunResult run = execute(preset("blowup-p2-reduced"));
      const double t_stop = run.stop ? run.stop->t_stop : std::numeric_limits<double>::infinity();
      const double aniso = gradient_anisotropy(*run.final_field);
      r.checks.push_back(detail::holds("stopped", run.stop.has_value()));
      r.checks.push_back(detail::within("t_stop", t_stop, 0.040, 0.055));
      r.checks.push_back(detail::above("grad_y_over_grad_x", aniso, 10.0));
      const auto s = detail::series(run.records, 0.0);
      r.metrics = {{"t_stop", t_stop},
                   {"stop_kind", run.stop ? to_string(run.stop->kind) : "none"},
                   {"anisotropy", aniso},
                   {"linf_final", run.records.back().linf},
                   {"l2_uy_nondecreasing", detail::nondecreasing(s.l2_uy)}};
    });
  }

  // 4. p = 1: regular evolution
  CriterionResult subcritical() {
    return timed(4, "subcritical regularity", [&](CriterionResult& r) {
      const RunConfig cfg = preset("subcritical-p1");
      const RunResult run = execute(cfg);
      const auto& last = run.records.back();
      const auto s = detail::series(run.records, 0.5 * cfg.t_final);
      r.checks.push_back(detail::holds("completed", !run.stop));
      r.checks.push_back(detail::at_most("delta", last.delta, 1e-5));
      r.checks.push_back(detail::at_most("fourier_decay", last.fourier_decay.value_or(1.0), 1e-4));
      r.checks.push_back(detail::holds("linf_decreasing_final_half", detail::decreasing_trend(s.t, s.linf)));
      r.checks.push_back(detail::holds("l2_uy_decreasing_final_half", detail::decreasing_trend(s.t, s.l2_uy)));
      r.metrics = {{"linf_mid", s.linf.front()}, {"linf_end", s.linf.back()},
                   {"l2_uy_mid", s.l2_uy.front()}, {"l2_uy_end", s.l2_uy.back()}};
    });
  }

  // 5. p = 4/3
  CriterionResult critical() {
    return timed(5, "critical exponent", [&](CriterionResult& r) {
      const RunResult run = execute(preset("critical-p43"));
      const auto s = detail::series(run.records, 0.0);
      r.checks.push_back(detail::holds("completed", !run.stop));
      r.checks.push_back(detail::holds("linf_decreasing", detail::decreasing_trend(s.t, s.linf)));
      r.checks.push_back(detail::holds("l2_uy_nondecreasing", detail::nondecreasing(s.l2_uy)));
      r.metrics = {{"t_end", s.t.back()},
                   {"stop_kind", run.stop ? to_string(run.stop->kind) : "none"},
                   {"linf_start", s.linf.front()}, {"linf_end", s.linf.back()},
                   {"fourier_decay_end", run.records.back().fourier_decay.value_or(-1.0)}};
    });
  }

  // 6. exact solutions
  CriterionResult exact_solutions() {
    return timed(6, "exact-solution residuals", [&](CriterionResult& r) {
      const KPParams kp1{Rational{1, 1}, -1};
      {
        // amplitude 3c solves the p = 1 equation; kdv_soliton's 3c/2 does not
        const Field k = a_sech2(make_grid(16, 1, 512, 4), 3.0, 1.0, 0.0);
        const double rel = sw_residual(k, 1.0, kp1) / l2_norm(k);
        r.checks.push_back(detail::at_most("kdv_relative_residual", rel, 1e-10));
      }
      {
        std::vector<double> res;
        for (auto [l, n] : {std::pair{20.0, 512}, {40.0, 1024}, {80.0, 2048}}) {
          const Field f = lump(make_grid(l, l, n, n), 1.0, 0.0, 0.0);
          res.push_back(sw_residual(f, 1.0, kp1) / l2_norm(f));
        }
        r.checks.push_back(detail::holds("lump_residual_decreasing", res[1] < res[0] && res[2] < res[1]));
        r.metrics["lump_residuals"] = res;
      }
      const double delta = zaitsev_transverse_wavenumber(1.0, 0.5);
      r.metrics["zaitsev_delta"] = delta;
      {
        const auto z = zaitsev(make_grid(10, 5.0 / delta, 1024, 256), 1.0, 0.5, 0.0);
        const double rel = sw_residual(z.field, z.speed, kp1) / l2_norm(z.field);
        r.checks.push_back(detail::at_most("zaitsev_relative_residual", rel, 1e-6));
      }
      {
        RunConfig cfg;
        cfg.preset = "zaitsev-propagation";
        cfg.params = kp1;
        cfg.lx = 10, cfg.ly = 5.0 / delta, cfg.nx = 512, cfg.ny = 256;
        cfg.t_final = 1.0, cfg.nt = 1000;
        cfg.initial = {{"zaitsev", {{"alpha", 1.0}, {"beta", 0.5}, {"x0", -5.0}}}};
        const RunResult run = execute(cfg);
        r.checks.push_back(detail::holds("zaitsev_completed", !run.stop));
        r.checks.push_back(detail::at_most("zaitsev_delta", run.records.back().delta, 1e-6));
      }
    });
  }

  // 7. integrator properties
  CriterionResult integrator() {
    return timed(7, "integrator properties", [&](CriterionResult& r) {
      double worst_linear = 0.0;
      for (int eps : {1, -1}) {
        const auto g = make_grid(2, 1, 64, 32);
        const Field u0 = project_constraint(random_modes(g, 12, 1234 + eps));
        KPParams lin;
        lin.epsilon = eps;
        lin.nonlinear = false;
        const double scale = max_abs(u0);
        for (std::size_t nt : {1, 7, 64}) {
          const auto ir = integrate(u0, 0.5, nt, lin);
          const Field exact = to_physical(linear_propagate(u0, 0.5, lin));
          worst_linear = std::max(worst_linear, max_abs(detail::final_physical(g, ir.state) + (-exact)) / scale);
        }
      }
      r.checks.push_back(detail::at_most("linear_exactness", worst_linear, 1e-11));

      const auto g = make_grid(8, 1, 256, 8);
      const Field u0 = a_sech2(g, 12.0, 4.0, -4.0);
      const Field exact = a_sech2(g, 12.0, 4.0, 0.0);
      std::vector<double> err;
      for (std::size_t nt : {100, 200, 400}) {
        const auto ir = integrate(u0, 1.0, nt, KPParams{}, observe_constraint(g));
        err.push_back(max_abs(detail::final_physical(g, ir.state) + (-exact)));
      }
      const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
      r.checks.push_back(detail::within("order_first_halving", o1, 3.7, 4.3));
      r.checks.push_back(detail::within("order_second_halving", o2, 3.7, 4.3));
      r.metrics["soliton_errors"] = err;

      // a KP I run with strong transverse structure
      RunConfig cfg = preset("kp1-perturbed-aligned");
      cfg.nx = 128, cfg.ny = 256, cfg.t_final = 0.5, cfg.nt = 500;
      cfg.snapshot_times.clear();
      execute(cfg);
      r.checks.push_back(detail::at_most("constraint_violation", max_constraint_, 1e-12));
      r.metrics["runs_checked"] = runs_;
    });
  }

  // 8. transforms and diagnostics
  CriterionResult transforms() {
    return timed(8, "transform and diagnostic properties", [&](CriterionResult& r) {
      const auto g = make_grid(1.5, 0.75, 64, 32);
      const Field u = random_field(g, 99);
      const double direct = l2_squared(u);
      const auto full = full_spectrum(to_spectral(u));
      double spec = 0.0;
      for (const auto& c : full) spec += std::norm(c);
      spec *= g->area();
      r.checks.push_back(detail::at_most("parseval_relative", std::abs(direct - spec) / direct, 1e-12));

      const auto path = std::filesystem::temp_directory_path() /
                        ("kpsim_roundtrip_" + std::to_string(std::random_device{}()) + ".kplb");
      save_snapshot(u, 0.125, path.string());
      const Snapshot back = load_snapshot(path.string());
      std::filesystem::remove(path);
      r.checks.push_back(detail::holds("snapshot_lossless", back.t == 0.125 && back.field.physical() == u.physical()));

      const auto lg = make_grid(20, 20, 256, 256);
      const double c = 1.7;
      const Field one = lump(lg, c, 0.0, 0.0);
      const auto peaks = find_peaks(one);
      double c_err = 1.0;
      if (!peaks.empty()) c_err = std::abs(fit_lump(one, peaks.front()).c_fit - c) / c;
      r.checks.push_back(detail::at_most("fit_lump_c_relative", c_err, 1e-12));

      const auto tg = make_grid(20, 20, 512, 512);
      const Field two = lump(tg, 1.0, -15.0, 0.0) + lump(tg, 1.0, 15.0, 0.0);
      r.checks.push_back(
          {"two_lump_peaks", static_cast<double>(find_peaks(two).size()), "==", "2", find_peaks(two).size() == 2});
    });
  }

  double max_constraint_violation() const { return max_constraint_; }

 private:
  template <class Body>
  CriterionResult timed(int number, std::string title, Body&& body) {
    CriterionResult r;
    r.number = number;
    r.title = std::move(title);
    if (log_) *log_ << "running criterion " << number << " (" << r.title << ")\n" << std::flush;
    const auto t0 = std::chrono::steady_clock::now();
    body(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

  RunResult execute(const RunConfig& cfg) {
    RunResult run = run_experiment(cfg, {false, nullptr});
    max_constraint_ = std::max(max_constraint_, run.max_constraint_violation);
    ++runs_;
    return run;
  }

  StepObserver observe_constraint(const GridPtr& g) {
    ++runs_;
    return [this, g](const StepState& s) {
      max_constraint_ = std::max(max_constraint_, constraint_violation(*g, s.u_hat));
      return StepControl::proceed;
    };
  }

  static Field random_field(const GridPtr& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    RealArray v(g->size());
    for (auto& x : v) x = d(rng);
    return Field::from_physical(g, std::move(v));
  }

  // a band-limited field with `modes` random low modes
  static Field random_modes(const GridPtr& g, int modes, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> jx(-6, 6), jy(-4, 4);
    struct Mode { double a, b; int j, k; };
    std::vector<Mode> m;
    for (int n = 0; n < modes; ++n) m.push_back({amp(rng), amp(rng), jx(rng), jy(rng)});
    return Field::from_function(g, [&](double x, double y) {
      double s = 0.0;
      for (const auto& q : m) {
        const double ph = q.j * x / g->lx() + q.k * y / g->ly();
        s += q.a * std::cos(ph) + q.b * std::sin(ph);
      }
      return s;
    });
  }

  std::ostream* log_;
  double max_constraint_ = 0.0;
  int runs_ = 0;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"fast", "paper-soliton", "all"};
  return names;
}

/// Runs a named suite: "fast" (criteria 6-8), "paper-soliton" (1-2) or
/// "all" (1-8). Failures are entries of the report, not exceptions.
inline VerifyReport verify(const std::string& suite, std::ostream* log = nullptr,
                           const std::function<void(const CriterionResult&)>& on_result = {}) {
  Verifier v(log);
  std::vector<std::function<CriterionResult()>> plan;
  const bool all = suite == "all";
  if (suite == "paper-soliton" || all) {
    plan.push_back([&] { return v.soliton_propagation(); });
    plan.push_back([&] { return v.perturbed_mass(); });
  }
  if (all) {
    plan.push_back([&] { return v.blowup_time(); });
    plan.push_back([&] { return v.subcritical(); });
    plan.push_back([&] { return v.critical(); });
  }
  if (suite == "fast" || all) {
    plan.push_back([&] { return v.exact_solutions(); });
    plan.push_back([&] { return v.integrator(); });
    plan.push_back([&] { return v.transforms(); });
  }
  if (plan.empty()) throw ConfigError("unknown verify suite '" + suite + "' (expected fast, paper-soliton or all)");
  VerifyReport report{suite, {}};
  for (auto& step : plan) {
    report.results.push_back(step());
    if (on_result) on_result(report.results.back());
  }
  return report;
}

}  // namespace kpsim
