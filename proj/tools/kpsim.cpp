// kpsim command-line driver: run, verify, fit, export, presets.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kpsim/presets.hpp"
#include "kpsim/runner.hpp"
#include "kpsim/verify.hpp"

namespace fs = std::filesystem;
using namespace kpsim;

namespace {

struct Overrides {
  std::optional<std::size_t> nx, ny, nt;
  std::optional<double> tmax, memory_budget;
  std::string out;
};

RunConfig resolve(const std::string& what) {
  if (fs::is_regular_file(what)) return load_config(what);
  if (has_preset(what)) return preset(what);
  throw ConfigError("'" + what + "' is neither a config file nor a preset (see `kpsim presets`)");
}

void apply(RunConfig& cfg, const Overrides& o, const std::string& fallback_name) {
  if (o.nx) cfg.nx = *o.nx;
  if (o.ny) cfg.ny = *o.ny;
  if (o.nt) cfg.nt = *o.nt;
  if (o.tmax) {
    cfg.t_final = *o.tmax;
    std::erase_if(cfg.snapshot_times, [&](double s) { return s > cfg.t_final; });
    if (cfg.snapshot_times.empty() || cfg.snapshot_times.back() < cfg.t_final) cfg.snapshot_times.push_back(cfg.t_final);
  }
  if (o.memory_budget) cfg.memory_budget_gib = *o.memory_budget;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (cfg.output_dir.empty()) cfg.output_dir = (fs::path("runs") / fallback_name).string();
}

int cmd_run(const std::string& what, const Overrides& o, bool quiet) {
  RunConfig cfg = resolve(what);
  const std::string name = cfg.preset.empty() ? fs::path(what).stem().string() : cfg.preset;
  apply(cfg, o, name);
  std::cout << "run " << name << ": " << cfg.nx << "x" << cfg.ny << " modes, T=" << cfg.t_final << ", Nt=" << cfg.nt
            << ", p=" << cfg.params.p.str() << ", eps=" << cfg.params.epsilon << " -> " << cfg.output_dir << '\n';
  const RunResult r = run_experiment(cfg, {true, quiet ? nullptr : &std::cout});
  const auto& last = r.records.back();
  std::cout << "finished at t=" << last.t << " after " << r.steps_taken << " steps (" << r.wall_time << " s)\n"
            << "  delta=" << last.delta << "  linf=" << last.linf << "  l2_uy=" << last.l2_uy
            << "  energy=" << last.energy << '\n';
  if (r.stop)
    std::cout << "  stopped: " << to_string(r.stop->kind) << " at t=" << r.stop->t_stop << " (step " << r.stop->step
              << ")\n";
  std::cout << "  " << r.snapshots.size() << " snapshots, timeseries.csv and summary.json written\n";
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out) {
  const VerifyReport rep = verify(suite, &std::cerr, [](const CriterionResult& r) { std::cout << r.line() << std::endl; });
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << rep.to_json().dump(2) << '\n';
  }
  std::cout << "suite " << suite << ": " << (rep.passed() ? "all criteria passed" : "some criteria failed") << '\n';
  return rep.passed() ? 0 : 1;
}

int cmd_fit(const std::string& path, double threshold, const std::string& out) {
  const Snapshot s = load_snapshot(path);
  const auto peaks = find_peaks(s.field, threshold);
  nlohmann::json j = {{"snapshot", path}, {"t", s.t}, {"threshold", threshold}};
  auto arr = nlohmann::json::array();
  std::printf("%zu peak(s) above %.2f of the maximum at t = %.6g\n", peaks.size(), threshold, s.t);
  std::printf("%12s %12s %12s %12s %12s\n", "x", "y", "height", "c_fit", "residual");
  std::vector<PeakFit> fits;
  for (const auto& p : peaks) {
    const PeakFit f = fit_lump(s.field, p);
    fits.push_back(f);
    std::printf("%12.6f %12.6f %12.6f %12.6f %12.4e\n", f.x_peak, f.y_peak, f.height, f.c_fit, f.residual_linf);
    arr.push_back({{"x", f.x_peak}, {"y", f.y_peak}, {"height", f.height}, {"c", f.c_fit},
                   {"residual_linf", f.residual_linf}});
  }
  j["peaks"] = arr;
  if (!fits.empty()) {
    const double rest = max_abs(subtract_lumps(s.field, fits));
    std::printf("max |u - fitted lumps| = %.6g\n", rest);
    j["remainder_linf"] = rest;
  }
  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << j.dump(2) << '\n';
  }
  return 0;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(cell);
  if (!line.empty() && line.back() == ',') v.emplace_back();
  return v;
}

// norms.csv with L-inf and |u_y|_2 normalised to 1 at t = 0, and one x,y,u
// table per snapshot
int cmd_export(const std::string& dir, const std::string& out_arg, std::size_t stride) {
  const fs::path run(dir);
  const fs::path ts = run / "timeseries.csv";
  std::ifstream in(ts);
  if (!in) throw std::runtime_error("cannot read " + ts.string());
  const fs::path out = out_arg.empty() ? run / "plot" : fs::path(out_arg);
  fs::create_directories(out);

  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw FormatError(ts.string() + ": missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ct = col("t"), cd = col("delta"), cl = col("linf"), cu = col("l2_uy");
  std::ofstream norms(out / "norms.csv");
  norms << "t,linf_normalized,l2_uy_normalized,delta\n" << std::setprecision(12);
  double l0 = 0.0, u0 = 0.0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() < header.size()) throw FormatError(ts.string() + ": short row " + std::to_string(rows + 2));
    const double l = std::stod(c[cl]), u = std::stod(c[cu]);
    if (rows++ == 0) l0 = l, u0 = u;
    norms << c[ct] << ',' << (l0 != 0.0 ? l / l0 : 0.0) << ',' << (u0 != 0.0 ? u / u0 : 0.0) << ',' << c[cd] << '\n';
  }

  std::vector<fs::path> snaps;
  for (const auto& e : fs::directory_iterator(run))
    if (e.path().extension() == ".kplb") snaps.push_back(e.path());
  std::sort(snaps.begin(), snaps.end());
  for (const auto& p : snaps) {
    const Snapshot s = load_snapshot(p.string());
    const auto& g = s.field.grid();
    const std::size_t step = stride ? stride : std::max<std::size_t>(1, std::max(g.nx(), g.ny()) / 256);
    std::ofstream os(out / (p.stem().string() + ".csv"));
    os << "# t = " << std::setprecision(17) << s.t << '\n' << "x,y,u\n" << std::setprecision(10);
    const auto& x = g.x();
    const auto& y = g.y();
    for (std::size_t i = 0; i < g.nx(); i += step)
      for (std::size_t k = 0; k < g.ny(); k += step) os << x[i] << ',' << y[k] << ',' << s.field.at(i, k) << '\n';
  }
  std::cout << "wrote norms.csv (" << rows << " rows) and " << snaps.size() << " snapshot table(s) to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier pseudospectral solver for generalized KP equations"};
  app.require_subcommand(1);

  Overrides o;
  std::string target;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "integrate a config file or named preset");
  run->add_option("target", target, "config file or preset name")->required();
  run->add_option("--nx", o.nx, "override N_x");
  run->add_option("--ny", o.ny, "override N_y");
  run->add_option("--nt", o.nt, "override N_t");
  run->add_option("--tmax", o.tmax, "override final time T");
  run->add_option("--out", o.out, "output directory (default runs/<name>)");
  run->add_option("--memory-budget", o.memory_budget, "memory budget in GiB");
  run->add_flag("-q,--quiet", quiet, "no progress lines");

  std::string suite, report;
  auto* ver = app.add_subcommand("verify", "run an acceptance suite: fast, paper-soliton, all");
  ver->add_option("suite", suite)->required()->check(CLI::IsMember(suite_names()));
  ver->add_option("--out", report, "write the JSON report here");

  std::string snap, fit_out;
  double threshold = 0.3;
  auto* fit = app.add_subcommand("fit", "find peaks in a snapshot and fit lumps");
  fit->add_option("snapshot", snap)->required();
  fit->add_option("--threshold", threshold, "peak threshold relative to the maximum")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--out", fit_out, "write the JSON report here");

  std::string run_dir, export_out;
  std::size_t stride = 0;
  auto* exp = app.add_subcommand("export", "write plot-ready tables for a run directory");
  exp->add_option("run-dir", run_dir)->required();
  exp->add_option("--out", export_out, "destination (default <run-dir>/plot)");
  exp->add_option("--stride", stride, "grid stride for snapshot tables (default: at most 256 per axis)");

  std::string shown;
  auto* pre = app.add_subcommand("presets", "list presets, or print one as a config file");
  pre->add_option("name", shown);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(target, o, quiet);
    if (*ver) return cmd_verify(suite, report);
    if (*fit) return cmd_fit(snap, threshold, fit_out);
    if (*exp) return cmd_export(run_dir, export_out, stride);
    if (*pre) {
      if (shown.empty())
        for (const auto& n : preset_names()) std::cout << n << '\n';
      else
        std::cout << to_config_text(preset(shown));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
