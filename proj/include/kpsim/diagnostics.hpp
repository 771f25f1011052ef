#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "kpsim/etd.hpp"
#include "kpsim/field.hpp"
#include "kpsim/model.hpp"
#include "kpsim/solutions.hpp"

namespace kpsim {

/// Fourier-decay ratio at or below which a field counts as resolved.
inline constexpr double kResolvedDecay = 1e-5;
/// Default relative-mass threshold for stopping a run.
inline constexpr double kDefaultStopThreshold = 1e-4;

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double delta = 0.0;
  double linf = 0.0;
  double l2_uy = 0.0;
  double energy = 0.0;
  std::optional<double> i_transverse;
  std::optional<double> fourier_decay;
  std::optional<StopReason> stop;

  bool resolved() const { return fourier_decay && *fourier_decay <= kResolvedDecay; }
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |1 - Mt / M0|.
inline double relative_mass_change(double m0, double mt) {
  if (m0 == 0.0) throw std::domain_error("relative mass change undefined for zero initial mass");
  return std::abs(1.0 - mt / m0);
}

/// Scalar diagnostics straight from the spectral state. Owns workspace, so
/// an instance serves one stepping loop.
class DiagnosticsEngine {
 public:
  DiagnosticsEngine(GridPtr grid, const KPParams& params)
      : grid_(std::move(grid)), params_(params), fft_(transform_for(*grid_)) {
    const auto& g = *grid_;
    const Multiplier ux = dx_multiplier(g, 1);
    const Multiplier uy = dy_multiplier(g, 1);
    const Multiplier w = inverse_dx_multiplier(g, params.zero_mode, params.epsilon) * uy;
    wx_.resize(g.spectral_size());
    wy_.resize(g.spectral_size());
    ww_.resize(g.spectral_size());
    for (std::size_t n = 0; n < wx_.size(); ++n) {
      const double hw = half_weight(g, n % g.nky());
      wx_[n] = hw * std::norm(ux[n]);
      wy_[n] = hw * std::norm(uy[n]);
      ww_[n] = hw * std::norm(w[n]);
    }
  }

  /// Scalar record at state s. `full` adds the transverse moment and the
  /// Fourier-decay ratio.
  DiagnosticsRecord record(const StepState& s, double mass0, bool full) {
    const auto& g = *grid_;
    fft_->inverse(s.u_hat, u_, scratch_);
    DiagnosticsRecord r;
    r.t = s.t;
    const Rational e = params_.p + 2;
    const double pe = (params_.p.value() + 1.0) * (params_.p.value() + 2.0);
    double m = 0.0, linf = 0.0, pot = 0.0;
    bool finite = true;
    for (double v : u_) {
      finite = finite && std::isfinite(v);
      m += v * v;
      linf = std::max(linf, std::abs(v));
      pot += signed_pow(v, e);
    }
    const double dA = g.cell_area();
    r.mass = m * dA;
    r.linf = finite ? linf : std::numeric_limits<double>::infinity();
    double sx = 0.0, sy = 0.0, sw = 0.0;
    for (std::size_t n = 0; n < s.u_hat.size(); ++n) {
      const double a = std::norm(s.u_hat[n]);
      sx += wx_[n] * a;
      sy += wy_[n] * a;
      sw += ww_[n] * a;
    }
    const double area = g.area();
    r.l2_uy = std::sqrt(area * sy);
    r.energy = 0.5 * area * sx - 0.5 * params_.epsilon * area * sw - pot * dA / pe;
    r.delta = mass0 > 0.0 ? relative_mass_change(mass0, r.mass) : 0.0;
    if (full) {
      r.i_transverse = transverse_moment_of(u_);
      r.fourier_decay = fourier_decay_of(s.u_hat);
    }
    return r;
  }

  double transverse_moment_of(const RealArray& u) const {
    const auto& g = *grid_;
    double s = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i)
      for (std::size_t j = 0; j < g.ny(); ++j) {
        const double y = g.y()[j], v = u[i * g.ny() + j];
        s += y * y * v * v;
      }
    return s * g.cell_area();
  }

  /// max |u_hat| over |j| > nx/4 or |k| > ny/4, relative to max |u_hat|.
  double fourier_decay_of(const ComplexArray& c) const {
    const auto& g = *grid_;
    const std::size_t nky = g.nky();
    double outer = 0.0, all = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const bool xo = std::abs(SpectralGrid::signed_index(i, g.nx())) > static_cast<long>(g.nx() / 4);
      for (std::size_t k = 0; k < nky; ++k) {
        const double a = std::abs(c[i * nky + k]);
        all = std::max(all, a);
        if (xo || k > g.ny() / 4) outer = std::max(outer, a);
      }
    }
    return all > 0.0 ? outer / all : 0.0;
  }

 private:
  GridPtr grid_;
  KPParams params_;
  std::shared_ptr<const FourierTransform> fft_;
  std::vector<double> wx_, wy_, ww_;
  RealArray u_;
  ComplexArray scratch_;
};

/// Discrete integral of u^2.
inline double mass(const Field& f) {
  const Field p = to_physical(f);
  double s = 0.0;
  for (double v : p.physical()) s += v * v;
  return s * f.grid().cell_area();
}

/// Energy  int [u_x^2/2 - eps (d_x^{-1} u_y)^2 / 2 - u^(p+2) / ((p+1)(p+2))].
inline double energy(const Field& f, const KPParams& params) {
  DiagnosticsEngine d(f.grid_ptr(), params);
  return d.record(StepState{0.0, to_spectral(f).spectral(), 0}, 0.0, false).energy;
}

struct Norms {
  double linf;
  double l2_uy;
};

inline Norms norms(const Field& f) {
  const Field s = to_spectral(f);
  const Field uy = apply_multiplier(s, dy_multiplier(f.grid(), 1));
  return {max_abs(s), l2_norm(uy)};
}

/// Discrete integral of y^2 u^2.
inline double transverse_moment(const Field& f) {
  DiagnosticsEngine d(f.grid_ptr(), KPParams{});
  return d.transverse_moment_of(to_physical(f).physical());
}

inline double fourier_decay(const Field& f) {
  DiagnosticsEngine d(f.grid_ptr(), KPParams{});
  return d.fourier_decay_of(to_spectral(f).spectral());
}

inline bool is_resolved(double decay_ratio) { return decay_ratio <= kResolvedDecay; }

/// max |u_y| / max |u_x|.
inline double gradient_anisotropy(const Field& f) {
  const Field s = to_spectral(f);
  const double ux = max_abs(apply_multiplier(s, dx_multiplier(f.grid(), 1)));
  const double uy = max_abs(apply_multiplier(s, dy_multiplier(f.grid(), 1)));
  return ux > 0.0 ? uy / ux : std::numeric_limits<double>::infinity();
}

inline std::optional<StopReason> detect_stop(const DiagnosticsRecord& rec, double threshold = kDefaultStopThreshold) {
  for (double v : {rec.mass, rec.delta, rec.linf, rec.l2_uy, rec.energy})
    if (!std::isfinite(v)) return StopReason{StopKind::nonfinite, rec.t};
  if (rec.delta > threshold) return StopReason{StopKind::delta_exceeded, rec.t};
  return std::nullopt;
}

struct Peak {
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
};

/// Strict local maxima over the periodic 8-neighbour stencil with height at
/// least rel_threshold * max(f), highest first (ties by x, then y).
inline std::vector<Peak> find_peaks(const Field& f, double rel_threshold = 0.3) {
  if (!(rel_threshold > 0.0 && rel_threshold <= 1.0)) throw ConfigError("peak threshold must lie in (0, 1]");
  const Field p = to_physical(f);
  const auto& g = f.grid();
  const auto& u = p.physical();
  const std::size_t nx = g.nx(), ny = g.ny();
  const double top = *std::max_element(u.begin(), u.end());
  const double cut = rel_threshold * top;
  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = u[i * ny + j];
      if (v < cut) continue;
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const std::size_t ii = (i + nx + di) % nx, jj = (j + ny + dj) % ny;
          if (!(v > u[ii * ny + jj])) {
            strict = false;
            break;
          }
        }
      if (strict) peaks.push_back({g.x()[i], g.y()[j], v, i, j});
    }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.height != b.height) return a.height > b.height;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  return peaks;
}

struct PeakFit {
  double x_peak = 0.0;
  double y_peak = 0.0;
  double height = 0.0;
  double c_fit = 0.0;
  double residual_linf = 0.0;
};

namespace detail {
/// Minimal-image displacement on a period.
inline double wrap(double d, double period) { return d - period * std::round(d / period); }
}  // namespace detail

/// Lump with c = height / 8 centred on the peak; residual is max |f - lump|
/// within radius 3 / sqrt(c) of the peak.
inline PeakFit fit_lump(const Field& f, const Peak& peak) {
  if (!(peak.height > 0.0)) throw FitError("lump fit needs a positive peak height");
  const Field p = to_physical(f);
  const auto& g = f.grid();
  PeakFit fit{peak.x, peak.y, peak.height, peak.height / 8.0, 0.0};
  const double radius = 3.0 / std::sqrt(fit.c_fit);
  const double px = 2.0 * std::numbers::pi * g.lx(), py = 2.0 * std::numbers::pi * g.ly();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double dx = detail::wrap(g.x()[i] - peak.x, px);
    if (std::abs(dx) > radius) continue;
    for (std::size_t j = 0; j < g.ny(); ++j) {
      const double dy = detail::wrap(g.y()[j] - peak.y, py);
      if (dx * dx + dy * dy > radius * radius) continue;
      const double r = std::abs(p.at(i, j) - lump_value(fit.c_fit, dx, dy));
      fit.residual_linf = std::max(fit.residual_linf, r);
    }
  }
  return fit;
}

/// f minus one fitted lump per entry (periodic minimal image).
inline Field subtract_lumps(const Field& f, const std::vector<PeakFit>& fits) {
  const auto& g = f.grid();
  const double px = 2.0 * std::numbers::pi * g.lx(), py = 2.0 * std::numbers::pi * g.ly();
  const Field p = to_physical(f);
  RealArray out(p.physical());
  for (const auto& fit : fits)
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double dx = detail::wrap(g.x()[i] - fit.x_peak, px);
      for (std::size_t j = 0; j < g.ny(); ++j)
        out[i * g.ny() + j] -= lump_value(fit.c_fit, dx, detail::wrap(g.y()[j] - fit.y_peak, py));
    }
  return Field::from_physical(f.grid_ptr(), std::move(out));
}

}  // namespace kpsim
