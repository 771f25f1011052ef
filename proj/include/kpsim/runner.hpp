#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpsim/config.hpp"
#include "kpsim/diagnostics.hpp"
#include "kpsim/etd.hpp"
#include "kpsim/snapshot.hpp"
#include "kpsim/solutions.hpp"

namespace kpsim {

struct SnapshotRef {
  double t;
  std::size_t step;
  std::string path;  // empty when nothing was written to disk
};

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  std::vector<SnapshotRef> snapshots;
  std::optional<StopReason> stop;
  double wall_time = 0.0;
  std::optional<Field> final_field;  // last accepted state
  std::size_t steps_taken = 0;
  double max_constraint_violation = 0.0;
};

struct RunOptions {
  bool write_files = true;      // only when cfg.output_dir is set
  std::ostream* log = nullptr;  // progress lines
};

/// Builds the summed initial data of cfg on grid g (before projection).
inline Field build_initial_data(const RunConfig& cfg, const GridPtr& g) {
  const auto& schema = initial_term_schema();
  Field u(g);
  for (const auto& term : cfg.initial) {
    auto it = schema.find(term.kind);
    if (it == schema.end()) throw ConfigError("unknown initial-data constructor '" + term.kind + "'");
    std::map<std::string, double> a = it->second;
    for (const auto& [k, v] : term.args) a[k] = v;
    Field f = [&]() -> Field {
      const std::string& k = term.kind;
      if (k == "sech2") return a_sech2(g, a["A"], a["c"], a["x0"]);
      if (k == "kdv_soliton") return kdv_soliton(g, a["c"], a["x0"]);
      if (k == "lump") return lump(g, a["c"], a["x0"], a["y0"]);
      if (k == "zaitsev") return zaitsev(g, a["alpha"], a["beta"], a["x0"]).field;
      if (k == "perturbation_pair") return perturbation_pair(g, a["x1"], a["sign"] < 0 ? -1 : 1, a["amplitude"]);
      if (k == "odd_bump") return odd_bump(g, a["amplitude"], a["x1"], a["y1"]);
      if (k == "gaussian_dxx") return gaussian_dxx(g, a["alpha"], a["amplitude"]);
      return deformed_soliton(g, a["A"], a["shift"], a["x0"]);
    }();
    if (a["scale"] != 1.0) f *= a["scale"];
    u += f;
  }
  return u;
}

/// Rough peak resident memory of a run in bytes.
inline double memory_estimate_bytes(const RunConfig& cfg) {
  const double spectral = static_cast<double>(cfg.nx) * static_cast<double>(cfg.ny / 2 + 1);
  const double physical = static_cast<double>(cfg.nx) * static_cast<double>(cfg.ny);
  // 6 ETD weights, 8 stage buffers, state + last good state, 4 operator arrays: complex
  // 3 diagnostic weights: real on the half layout; 4 physical work arrays
  return 20.0 * 16.0 * spectral + 3.0 * 8.0 * spectral + 4.0 * 8.0 * physical;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline void write_timeseries(const std::vector<DiagnosticsRecord>& recs, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << "t,mass,delta,linf,l2_uy,energy,I_transverse,fourier_decay\n";
  for (const auto& r : recs) {
    os << fmt(r.t) << ',' << fmt(r.mass) << ',' << fmt(r.delta) << ',' << fmt(r.linf) << ',' << fmt(r.l2_uy) << ','
       << fmt(r.energy) << ',' << (r.i_transverse ? fmt(*r.i_transverse) : "") << ','
       << (r.fourier_decay ? fmt(*r.fourier_decay) : "") << '\n';
  }
}

inline nlohmann::json stop_json(const std::optional<StopReason>& s) {
  if (!s) return nullptr;
  return {{"kind", to_string(s->kind)}, {"t_stop", s->t_stop}, {"step", s->step}};
}

}  // namespace detail

/// Builds the initial data, integrates, records diagnostics, and writes
/// timeseries.csv, summary.json and snapshots into cfg.output_dir.
///
/// Blow-up (non-finite values) and threshold crossings are reported in the
/// result; configuration and I/O problems throw.
inline RunResult run_experiment(const RunConfig& cfg, const RunOptions& opt = {}) {
  cfg.validate();
  const double need = memory_estimate_bytes(cfg);
  const double budget = cfg.memory_budget_gib * 1024.0 * 1024.0 * 1024.0;
  if (need > budget) {
    std::ostringstream os;
    os << std::setprecision(3) << "run needs about " << need / (1u << 30) << " GiB, above the budget of "
       << cfg.memory_budget_gib << " GiB; lower --nx/--ny or raise --memory-budget";
    throw ConfigError(os.str());
  }
  const bool write = opt.write_files && !cfg.output_dir.empty();
  namespace fs = std::filesystem;
  if (write) fs::create_directories(cfg.output_dir);

  const auto wall0 = std::chrono::steady_clock::now();
  const GridPtr g = make_grid(cfg.lx, cfg.ly, cfg.nx, cfg.ny);
  const Field u0 = build_initial_data(cfg, g);
  const double dt = cfg.t_final / static_cast<double>(cfg.nt);

  std::map<std::size_t, double> snap_steps;  // step -> requested time
  for (double s : cfg.snapshot_times) {
    const auto k = static_cast<std::size_t>(std::llround(s / dt));
    snap_steps.emplace(std::min(k, cfg.nt), s);
  }

  RunResult res;
  DiagnosticsEngine diag(g, cfg.params);
  double mass0 = 0.0;
  std::optional<StopReason> detected;
  StepState last_good;

  auto snapshot = [&](const StepState& s) {
    SnapshotRef ref{s.t, s.step_index, ""};
    if (write) {
      char name[64];
      std::snprintf(name, sizeof name, "snap_%07zu.kplb", s.step_index);
      ref.path = (fs::path(cfg.output_dir) / name).string();
      save_snapshot(Field::from_spectral(g, s.u_hat), s.t, ref.path);
    }
    res.snapshots.push_back(ref);
  };

  const std::size_t log_every = std::max<std::size_t>(1, cfg.nt / 10);
  StepObserver observer = [&](const StepState& s) {
    const bool full = s.step_index % cfg.cadence == 0 || s.step_index == cfg.nt;
    if (s.step_index == 0) mass0 = diag.record(s, 0.0, false).mass;
    DiagnosticsRecord rec = diag.record(s, mass0, full);
    res.max_constraint_violation = std::max(res.max_constraint_violation, constraint_violation(*g, s.u_hat));
    res.steps_taken = s.step_index;
    detected = detect_stop(rec, cfg.stop_threshold);
    if (!detected) last_good = s;
    if (detected) {
      detected->step = s.step_index;
      rec.stop = detected;
    }
    res.records.push_back(rec);
    if (snap_steps.contains(s.step_index) && !detected) snapshot(s);
    if (opt.log && s.step_index % log_every == 0)
      *opt.log << "  step " << s.step_index << "/" << cfg.nt << "  t=" << s.t << "  delta=" << rec.delta
               << "  linf=" << rec.linf << '\n';
    return detected ? StepControl::stop : StepControl::proceed;
  };

  IntegrationResult ir = integrate(u0, cfg.t_final, cfg.nt, cfg.params, observer, 1);
  if (detected) {
    res.stop = detected;
  } else if (ir.stop) {
    res.stop = ir.stop;
    if (!res.records.empty()) res.records.back().stop = ir.stop;
  }
  // a delta-exceeded state is still finite, so it is the last accepted step
  const StepState& final_state = (detected && detected->kind == StopKind::nonfinite) ? last_good : ir.state;
  if (res.stop && (res.snapshots.empty() || res.snapshots.back().step != final_state.step_index))
    snapshot(final_state);
  res.final_field = to_physical(Field::from_spectral(g, final_state.u_hat));
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

  if (write) {
    detail::write_timeseries(res.records, (fs::path(cfg.output_dir) / "timeseries.csv").string());
    nlohmann::json j;
    j["preset"] = cfg.preset;
    j["steps_taken"] = res.steps_taken;
    j["stop"] = detail::stop_json(res.stop);
    j["wall_time_s"] = res.wall_time;
    if (!res.records.empty()) {
      const auto& r = res.records.back();
      j["final"] = {{"t", r.t}, {"delta", r.delta}, {"linf", r.linf}, {"l2_uy", r.l2_uy}, {"energy", r.energy}};
    }
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : res.snapshots) snaps.push_back({{"t", s.t}, {"step", s.step}, {"path", s.path}});
    j["snapshots"] = snaps;
    j["max_constraint_violation"] = res.max_constraint_violation;
    std::ofstream os(fs::path(cfg.output_dir) / "summary.json");
    os << j.dump(2) << '\n';
    std::ofstream cs(fs::path(cfg.output_dir) / "config.txt");
    cs << to_config_text(cfg);
  }
  return res;
}

}  // namespace kpsim
