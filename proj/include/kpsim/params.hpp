#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>

#include "kpsim/error.hpp"

namespace kpsim {

/// Positive rational m/n in lowest terms.
struct Rational {
  long num = 1;
  long den = 1;

  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  constexpr bool is_integer() const { return den == 1; }

  Rational reduced() const {
    const long g = std::gcd(num, den);
    Rational r{num / g, den / g};
    if (r.den < 0) r = {-r.num, -r.den};
    return r;
  }

  friend Rational operator+(Rational a, long k) { return Rational{a.num + k * a.den, a.den}.reduced(); }
  friend bool operator==(const Rational&, const Rational&) = default;

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

  /// Parses "2" or "4/3".
  static Rational parse(std::string_view s) {
    auto parse_long = [&](std::string_view t) {
      long v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("invalid rational '" + std::string(s) + "'");
      return v;
    };
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational{parse_long(s), 1};
    const long d = parse_long(s.substr(slash + 1));
    if (d == 0) throw ConfigError("zero denominator in '" + std::string(s) + "'");
    return Rational{parse_long(s.substr(0, slash)), d}.reduced();
  }
};

/// Real power that stays real for exponents a/b with b odd:
/// sign(u)^a * |u|^(a/b); ordinary power for integer exponents.
inline double signed_pow(double u, const Rational& e) {
  if (e.is_integer()) {
    double r = 1.0;
    double base = u;
    long n = e.num;
    while (n > 0) {
      if (n & 1) r *= base;
      base *= base;
      n >>= 1;
    }
    return r;
  }
  const double mag = std::pow(std::abs(u), e.value());
  return (u < 0.0 && (e.num % 2 != 0)) ? -mag : mag;
}

enum class ZeroModeKind { project, tiny_shift };

/// Handling of the xi1 = 0 column of the singular multiplier.
struct ZeroModePolicy {
  ZeroModeKind kind = ZeroModeKind::project;
  double shift = 1e-16;

  static ZeroModePolicy project() { return {}; }
  static ZeroModePolicy tiny_shift(double delta = 1e-16) { return {ZeroModeKind::tiny_shift, delta}; }

  friend bool operator==(const ZeroModePolicy&, const ZeroModePolicy&) = default;
};

/// Parameters of u_t + u_xxx + eps d_x^{-1} u_yy + u^p u_x = 0.
struct KPParams {
  Rational p{1, 1};
  int epsilon = 1;  // +1 KP II, -1 KP I
  ZeroModePolicy zero_mode{};
  bool dealias = false;
  bool nonlinear = true;  // false evolves the linear equation only

  void validate() const {
    if (p.num <= 0 || p.den <= 0) throw ConfigError("nonlinearity exponent p must be positive, got " + p.str());
    if (p.den % 2 == 0) throw ConfigError("denominator of p must be odd, got " + p.str());
    if (epsilon != 1 && epsilon != -1) throw ConfigError("epsilon must be +1 or -1");
    if (zero_mode.kind == ZeroModeKind::tiny_shift && !(zero_mode.shift > 0.0 && zero_mode.shift <= 1e-12))
      throw ConfigError("tiny_shift delta must satisfy 0 < delta <= 1e-12");
  }

  friend bool operator==(const KPParams&, const KPParams&) = default;
};

}  // namespace kpsim
