#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

#include "kpsim/field.hpp"
#include "kpsim/model.hpp"

namespace kpsim {

namespace detail {
inline double sech2(double z) {
  if (std::abs(z) > 350.0) return 0.0;
  const double s = 1.0 / std::cosh(z);
  return s * s;
}
}  // namespace detail

/// A sech^2(sqrt(c) (x - x0) / 2), constant in y. With A = 3c this is the
/// exact line soliton of speed c for p = 1.
inline Field a_sech2(GridPtr grid, double amplitude, double c, double x0) {
  if (!(c > 0.0)) throw ConfigError("soliton speed must be positive");
  const double k = std::sqrt(c) / 2.0;
  return Field::from_function(std::move(grid), [&](double x, double) { return amplitude * detail::sech2(k * (x - x0)); });
}

/// (3c/2) sech^2(sqrt(c) (x - x0) / 2).
inline Field kdv_soliton(GridPtr grid, double c, double x0) { return a_sech2(std::move(grid), 1.5 * c, c, x0); }

/// Lump of speed c centred at (x0, y0); peak value 8c.
inline double lump_value(double c, double x, double y) {
  const double a = c / 3.0 * x * x;
  const double b = c * c / 3.0 * y * y;
  const double d = 1.0 + a + b;
  return 8.0 * c * (1.0 - a + b) / (d * d);
}

inline Field lump(GridPtr grid, double c, double x0, double y0) {
  if (!(c > 0.0)) throw ConfigError("lump speed must be positive");
  const auto& g = *grid;
  const double edge = std::max(std::abs(lump_value(c, g.lx() * std::numbers::pi, 0.0)),
                               std::abs(lump_value(c, 0.0, g.ly() * std::numbers::pi)));
  if (edge > 1e-2 * 8.0 * c) {
    std::ostringstream os;
    os << "lump boundary value " << edge << " exceeds 1% of its peak; enlarge the domain";
    warn(os.str());
  }
  return Field::from_function(std::move(grid), [&](double x, double y) { return lump_value(c, x - x0, y - y0); });
}

/// Speed of the Zaitsev wave, alpha^2 (4 - beta^2) / (1 - beta^2).
inline double zaitsev_speed(double alpha, double beta) {
  return alpha * alpha * (4.0 - beta * beta) / (1.0 - beta * beta);
}

inline double zaitsev_value(double alpha, double beta, double delta, double x, double y) {
  const double ax = alpha * x;
  if (std::abs(ax) > 350.0) return 0.0;
  const double ch = std::cosh(ax);
  const double cy = beta * std::cos(delta * y);
  const double den = ch - cy;
  return 12.0 * alpha * alpha * (1.0 - ch * cy) / (den * den);
}

inline Field zaitsev_profile(GridPtr grid, double alpha, double beta, double delta, double x0) {
  return Field::from_function(std::move(grid),
                              [&](double x, double y) { return zaitsev_value(alpha, beta, delta, x - x0, y); });
}

/// Relative KP I residual of the Zaitsev profile on a one-period grid.
inline double zaitsev_relative_residual(double alpha, double beta, double delta) {
  auto g = make_grid(10.0 / alpha, 1.0 / delta, 1024, 64);
  const Field z = zaitsev_profile(g, alpha, beta, delta, 0.0);
  const KPParams kp1{Rational{1, 1}, -1};
  return sw_residual(z, zaitsev_speed(alpha, beta), kp1) / l2_norm(z);
}

/// Transverse wavenumber of the Zaitsev wave, found by minimising the KP I
/// solitary-wave residual over delta. Returns 0 for beta = 0 (no y-dependence).
inline double zaitsev_transverse_wavenumber(double alpha, double beta) {
  if (!(alpha > 0.0)) throw ConfigError("zaitsev alpha must be positive");
  if (!(std::abs(beta) < 1.0)) throw ConfigError("zaitsev beta must satisfy |beta| < 1");
  if (beta == 0.0) return 0.0;

  static std::mutex mutex;
  static std::map<std::pair<double, double>, double> memo;
  {
    std::lock_guard lock(mutex);
    if (auto it = memo.find({alpha, beta}); it != memo.end()) return it->second;
  }

  auto f = [&](double d) { return zaitsev_relative_residual(alpha, beta, d); };
  // coarse geometric scan, then golden section inside the best bracket
  const int n = 48;
  const double lo = 0.05 * alpha * alpha, hi = 50.0 * alpha * alpha;
  const double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  int best = 0;
  double best_val = f(lo);
  for (int k = 1; k < n; ++k) {
    const double v = f(lo * std::pow(ratio, k));
    if (v < best_val) best_val = v, best = k;
  }
  double a = lo * std::pow(ratio, std::max(best - 1, 0));
  double b = lo * std::pow(ratio, std::min(best + 1, n - 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13 * b) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double delta = 0.5 * (a + b);
  std::lock_guard lock(mutex);
  memo[{alpha, beta}] = delta;
  return delta;
}

struct ZaitsevWave {
  Field field;
  double speed;
  double delta;
};

/// Zaitsev wave centred at x0 with the derived transverse wavenumber.
inline ZaitsevWave zaitsev(GridPtr grid, double alpha, double beta, double x0) {
  const double delta = zaitsev_transverse_wavenumber(alpha, beta);
  if (delta > 0.0) {
    const double periods = grid->ly() * delta;
    if (std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods)) {
      std::ostringstream os;
      os << "Ly * delta = " << periods << " is not an integer; the Zaitsev wave is not periodic on this grid";
      warn(os.str());
    }
  }
  Field f = zaitsev_profile(std::move(grid), alpha, beta, delta, x0);
  return {std::move(f), zaitsev_speed(alpha, beta), delta};
}

/// sign * A (x - x1) exp(-(x - x1)^2) [exp(-(y + Ly pi/2)^2) + exp(-(y - Ly pi/2)^2)]
inline Field perturbation_pair(GridPtr grid, double x1, int sign, double amplitude = 6.0) {
  const double yc = grid->ly() * std::numbers::pi / 2.0;
  const double s = sign >= 0 ? amplitude : -amplitude;
  return Field::from_function(std::move(grid), [&](double x, double y) {
    const double t = x - x1;
    return s * t * std::exp(-t * t) * (std::exp(-(y + yc) * (y + yc)) + std::exp(-(y - yc) * (y - yc)));
  });
}

/// A (x - x1) exp(-(x - x1)^2 - (y - y1)^2), an x-derivative of a gaussian.
inline Field odd_bump(GridPtr grid, double amplitude, double x1, double y1) {
  return Field::from_function(std::move(grid), [&](double x, double y) {
    const double t = x - x1, s = y - y1;
    return amplitude * t * std::exp(-t * t - s * s);
  });
}

/// amplitude * d_xx exp(-alpha (x^2 + y^2)).
inline Field gaussian_dxx(GridPtr grid, double alpha, double amplitude) {
  if (!(alpha > 0.0)) throw ConfigError("gaussian alpha must be positive");
  return Field::from_function(std::move(grid), [&](double x, double y) {
    return amplitude * (4.0 * alpha * alpha * x * x - 2.0 * alpha) * std::exp(-alpha * (x * x + y * y));
  });
}

/// A sech^2(x + shift cos(2y / Ly)); defaults give 12 sech^2(x + 0.4 cos(2y/Ly)).
inline Field deformed_soliton(GridPtr grid, double amplitude = 12.0, double shift = 0.4, double x0 = 0.0) {
  const double ly = grid->ly();
  return Field::from_function(std::move(grid), [&](double x, double y) {
    return amplitude * detail::sech2(x - x0 + shift * std::cos(2.0 * y / ly));
  });
}

}  // namespace kpsim
