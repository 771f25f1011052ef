#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kpsim/diagnostics.hpp"
#include "kpsim/params.hpp"

namespace kpsim {

/// One summand of the initial data: a constructor name plus keyword arguments.
struct InitialTerm {
  std::string kind;
  std::map<std::string, double> args;

  friend bool operator==(const InitialTerm&, const InitialTerm&) = default;
};

/// Description of one experiment.
struct RunConfig {
  std::string preset;
  KPParams params;
  double lx = 0.0, ly = 0.0;
  std::size_t nx = 0, ny = 0;
  double t_final = 0.0;
  std::size_t nt = 0;
  std::size_t cadence = 10;  // steps between full (costly) diagnostics
  double stop_threshold = kDefaultStopThreshold;
  std::vector<InitialTerm> initial;
  std::vector<double> snapshot_times;
  std::string output_dir;
  double memory_budget_gib = 2.0;

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(const std::string& source, int line, const std::string& msg)
      : ConfigError(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Keyword arguments accepted by each initial-data constructor, with defaults.
inline const std::map<std::string, std::map<std::string, double>>& initial_term_schema() {
  static const std::map<std::string, std::map<std::string, double>> schema = {
      {"sech2", {{"A", 12.0}, {"c", 4.0}, {"x0", 0.0}, {"scale", 1.0}}},
      {"kdv_soliton", {{"c", 1.0}, {"x0", 0.0}, {"scale", 1.0}}},
      {"lump", {{"c", 1.0}, {"x0", 0.0}, {"y0", 0.0}, {"scale", 1.0}}},
      {"zaitsev", {{"alpha", 1.0}, {"beta", 0.5}, {"x0", 0.0}, {"scale", 1.0}}},
      {"perturbation_pair", {{"x1", 0.0}, {"sign", 1.0}, {"amplitude", 6.0}, {"scale", 1.0}}},
      {"odd_bump", {{"amplitude", 6.0}, {"x1", 0.0}, {"y1", 0.0}, {"scale", 1.0}}},
      {"gaussian_dxx", {{"alpha", 1.0}, {"amplitude", 6.0}, {"scale", 1.0}}},
      {"deformed_soliton", {{"A", 12.0}, {"shift", 0.4}, {"x0", 0.0}, {"scale", 1.0}}},
  };
  return schema;
}

inline void RunConfig::validate() const {
  params.validate();
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("grid lengths Lx, Ly must be positive");
  if (nx < 2 || ny < 2 || !is_power_of_two(nx) || !is_power_of_two(ny))
    throw ConfigError("Nx, Ny must be powers of two >= 2");
  if (!(t_final > 0.0)) throw ConfigError("T must be positive");
  if (nt < 1) throw ConfigError("Nt must be at least 1");
  if (cadence < 1) throw ConfigError("cadence must be at least 1");
  if (!(stop_threshold > 0.0)) throw ConfigError("stop threshold must be positive");
  if (initial.empty()) throw ConfigError("initial data needs at least one term");
  const auto& schema = initial_term_schema();
  for (const auto& term : initial) {
    auto it = schema.find(term.kind);
    if (it == schema.end()) throw ConfigError("unknown initial-data constructor '" + term.kind + "'");
    for (const auto& [k, v] : term.args) {
      if (!it->second.contains(k)) throw ConfigError("constructor '" + term.kind + "' has no argument '" + k + "'");
      if (!std::isfinite(v)) throw ConfigError("argument '" + k + "' is not finite");
    }
  }
  for (double s : snapshot_times)
    if (s < 0.0 || s > t_final) throw ConfigError("snapshot times must lie in [0, T]");
  if (!(memory_budget_gib > 0.0)) throw ConfigError("memory budget must be positive");
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

/// Arithmetic over numbers and the symbols pi, Lx, Ly: + - * / and parentheses.
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const std::map<std::string, double>& symbols)
      : s_(text), symbols_(symbols) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("bad expression '" + std::string(s_) + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) return ++pos_, true;
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = factor();
    for (;;) {
      if (eat('*')) v *= factor();
      else if (eat('/')) v /= factor();
      else return v;
    }
  }
  double factor() {
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    skip();
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      const std::size_t b = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name(s_.substr(b, pos_ - b));
      auto it = symbols_.find(name);
      if (it == symbols_.end()) fail("unknown symbol '" + name + "'");
      return it->second;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  std::string_view s_;
  const std::map<std::string, double>& symbols_;
  std::size_t pos_ = 0;
};

struct Entry {
  std::string key, value;
  int line;
};

}  // namespace detail

inline double evaluate_expression(std::string_view text, const std::map<std::string, double>& symbols = {}) {
  std::map<std::string, double> all = symbols;
  all.emplace("pi", std::numbers::pi);
  return detail::ExpressionParser(text, all).parse();
}

/// Parses the sectioned text format:
///
///   [model]   p, epsilon, zero_mode (project | tiny_shift[:delta]), dealias, nonlinear
///   [grid]    Lx, Ly, Nx, Ny
///   [time]    T, Nt, cadence, stop_threshold
///   [initial] term = <constructor> key=value ...   (repeatable, summed in order)
///   [output]  dir, snapshots (comma separated), memory_budget_gib
///   [run]     preset (informational name)
///
/// Values may use + - * / ( ) with pi, Lx and Ly. '#' starts a comment.
inline RunConfig parse_config(std::string_view text, const std::string& source = "<config>") {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"run", {"preset"}},
      {"model", {"p", "epsilon", "zero_mode", "dealias", "nonlinear"}},
      {"grid", {"Lx", "Ly", "Nx", "Ny"}},
      {"time", {"T", "Nt", "cadence", "stop_threshold"}},
      {"initial", {"term"}},
      {"output", {"dir", "snapshots", "memory_budget_gib"}},
  };
  std::map<std::string, std::vector<detail::Entry>> sections;
  std::map<std::string, std::map<std::string, int>> seen;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigParseError(source, lineno, "unterminated section header");
      current = detail::trim(line.substr(1, line.size() - 2));
      if (!allowed.contains(current)) throw ConfigParseError(source, lineno, "unknown section [" + current + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigParseError(source, lineno, "expected key = value");
    if (current.empty()) throw ConfigParseError(source, lineno, "key outside of a section");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!allowed.at(current).contains(key))
      throw ConfigParseError(source, lineno, "unknown key '" + key + "' in [" + current + "]");
    if (key != "term" && seen[current].contains(key))
      throw ConfigParseError(source, lineno, "duplicate key '" + key + "'");
    seen[current][key] = lineno;
    sections[current].push_back({key, value, lineno});
  }

  RunConfig cfg;
  std::map<std::string, double> symbols;
  auto number = [&](const detail::Entry& e) {
    try {
      return evaluate_expression(e.value, symbols);
    } catch (const ConfigError& err) {
      throw ConfigParseError(source, e.line, err.what());
    }
  };
  auto count = [&](const detail::Entry& e) -> std::size_t {
    const double v = number(e);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e15)
      throw ConfigParseError(source, e.line, "'" + e.key + "' must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  auto boolean = [&](const detail::Entry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigParseError(source, e.line, "'" + e.key + "' must be true or false");
  };
  auto require = [&](const std::string& sec, const std::string& key) -> const detail::Entry& {
    for (const auto& e : sections[sec])
      if (e.key == key) return e;
    throw ConfigParseError(source, lineno, "missing required key '" + key + "' in [" + sec + "]");
  };

  // grid first: its lengths are symbols for every other section
  cfg.lx = number(require("grid", "Lx"));
  symbols["Lx"] = cfg.lx;
  cfg.ly = number(require("grid", "Ly"));
  symbols["Ly"] = cfg.ly;
  cfg.nx = count(require("grid", "Nx"));
  cfg.ny = count(require("grid", "Ny"));

  for (const auto& e : sections["run"]) cfg.preset = e.value;
  for (const auto& e : sections["model"]) {
    try {
      if (e.key == "p") cfg.params.p = Rational::parse(e.value);
      else if (e.key == "epsilon") cfg.params.epsilon = static_cast<int>(number(e));
      else if (e.key == "dealias") cfg.params.dealias = boolean(e);
      else if (e.key == "nonlinear") cfg.params.nonlinear = boolean(e);
      else if (e.key == "zero_mode") {
        if (e.value == "project") cfg.params.zero_mode = ZeroModePolicy::project();
        else if (e.value.starts_with("tiny_shift")) {
          double d = 1e-16;
          if (e.value.size() > 10) {
            if (e.value[10] != ':') throw ConfigError("expected tiny_shift:<delta>");
            d = evaluate_expression(e.value.substr(11));
          }
          cfg.params.zero_mode = ZeroModePolicy::tiny_shift(d);
        } else {
          throw ConfigError("zero_mode must be project or tiny_shift[:delta]");
        }
      }
    } catch (const ConfigParseError&) {
      throw;
    } catch (const ConfigError& err) {
      throw ConfigParseError(source, e.line, err.what());
    }
  }
  cfg.t_final = number(require("time", "T"));
  cfg.nt = count(require("time", "Nt"));
  for (const auto& e : sections["time"]) {
    if (e.key == "cadence") cfg.cadence = count(e);
    else if (e.key == "stop_threshold") cfg.stop_threshold = number(e);
  }
  for (const auto& e : sections["initial"]) {
    std::istringstream ts(e.value);
    InitialTerm term;
    if (!(ts >> term.kind)) throw ConfigParseError(source, e.line, "empty term");
    const auto& schema = initial_term_schema();
    auto sit = schema.find(term.kind);
    if (sit == schema.end()) throw ConfigParseError(source, e.line, "unknown initial-data constructor '" + term.kind + "'");
    std::string kv;
    while (ts >> kv) {
      const auto p = kv.find('=');
      if (p == std::string::npos) throw ConfigParseError(source, e.line, "expected key=value, got '" + kv + "'");
      const std::string k = kv.substr(0, p);
      if (!sit->second.contains(k))
        throw ConfigParseError(source, e.line, "constructor '" + term.kind + "' has no argument '" + k + "'");
      term.args[k] = number({k, kv.substr(p + 1), e.line});
    }
    cfg.initial.push_back(std::move(term));
  }
  for (const auto& e : sections["output"]) {
    if (e.key == "dir") cfg.output_dir = e.value;
    else if (e.key == "memory_budget_gib") cfg.memory_budget_gib = number(e);
    else if (e.key == "snapshots") {
      std::istringstream ss(e.value);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!detail::trim(item).empty()) cfg.snapshot_times.push_back(number({e.key, detail::trim(item), e.line}));
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigParseError&) {
    throw;
  } catch (const ConfigError& err) {
    throw ConfigError(source + ": " + err.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

/// Writes cfg in the text format read by parse_config (numbers round-trip).
inline std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << std::setprecision(17);
  if (!cfg.preset.empty()) os << "[run]\npreset = " << cfg.preset << "\n\n";
  os << "[model]\np = " << cfg.params.p.str() << "\nepsilon = " << cfg.params.epsilon << "\nzero_mode = ";
  if (cfg.params.zero_mode.kind == ZeroModeKind::project) os << "project";
  else os << "tiny_shift:" << cfg.params.zero_mode.shift;
  os << "\ndealias = " << (cfg.params.dealias ? "true" : "false");
  os << "\nnonlinear = " << (cfg.params.nonlinear ? "true" : "false") << "\n\n";
  os << "[grid]\nLx = " << cfg.lx << "\nLy = " << cfg.ly << "\nNx = " << cfg.nx << "\nNy = " << cfg.ny << "\n\n";
  os << "[time]\nT = " << cfg.t_final << "\nNt = " << cfg.nt << "\ncadence = " << cfg.cadence
     << "\nstop_threshold = " << cfg.stop_threshold << "\n\n";
  os << "[initial]\n";
  for (const auto& t : cfg.initial) {
    os << "term = " << t.kind;
    for (const auto& [k, v] : t.args) os << ' ' << k << '=' << v;
    os << '\n';
  }
  os << "\n[output]\n";
  if (!cfg.output_dir.empty()) os << "dir = " << cfg.output_dir << '\n';
  if (!cfg.snapshot_times.empty()) {
    os << "snapshots = ";
    for (std::size_t n = 0; n < cfg.snapshot_times.size(); ++n) os << (n ? ", " : "") << cfg.snapshot_times[n];
    os << '\n';
  }
  os << "memory_budget_gib = " << cfg.memory_budget_gib << '\n';
  return os.str();
}

}  // namespace kpsim
