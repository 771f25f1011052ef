#pragma once

#include <atomic>
#include <cstddef>
#include <iostream>
#include <stdexcept>
#include <string>

namespace kpsim {

/// Invalid grid, parameter, or configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared during a transform or a time step.
class NumericalOverflow : public std::runtime_error {
 public:
  explicit NumericalOverflow(const std::string& what, std::size_t step = 0)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed snapshot or table file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::atomic<bool>& warnings_enabled() {
  static std::atomic<bool> enabled{true};
  return enabled;
}

inline void warn(const std::string& msg) {
  if (warnings_enabled()) std::cerr << "kpsim: warning: " << msg << '\n';
}

}  // namespace kpsim
