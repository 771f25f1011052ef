#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "kpsim/error.hpp"
#include "kpsim/fft.hpp"
#include "kpsim/grid.hpp"

namespace kpsim {

enum class Representation { physical, spectral, both };

/// A real scalar field on a SpectralGrid with a physical and/or spectral cache.
class Field {
 public:
  explicit Field(GridPtr grid) : grid_(std::move(grid)), physical_(RealArray(grid_->size(), 0.0)) {}

  static Field from_physical(GridPtr grid, RealArray values) {
    if (values.size() != grid->size()) throw ConfigError("physical array does not match grid size");
    Field f(std::move(grid), std::nullopt, std::nullopt);
    f.physical_ = std::move(values);
    return f;
  }

  static Field from_spectral(GridPtr grid, ComplexArray coeffs) {
    if (coeffs.size() != grid->spectral_size()) throw ConfigError("spectral array does not match grid size");
    Field f(std::move(grid), std::nullopt, std::nullopt);
    f.spectral_ = std::move(coeffs);
    return f;
  }

  /// Samples fn(x, y) at every node.
  template <class Fn>
  static Field from_function(GridPtr grid, Fn&& fn) {
    RealArray v(grid->size());
    const auto& xs = grid->x();
    const auto& ys = grid->y();
    for (std::size_t i = 0; i < grid->nx(); ++i)
      for (std::size_t j = 0; j < grid->ny(); ++j) v[i * grid->ny() + j] = fn(xs[i], ys[j]);
    return from_physical(std::move(grid), std::move(v));
  }

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  bool has_physical() const { return physical_.has_value(); }
  bool has_spectral() const { return spectral_.has_value(); }
  Representation representation() const {
    if (has_physical() && has_spectral()) return Representation::both;
    return has_physical() ? Representation::physical : Representation::spectral;
  }

  const RealArray& physical() const {
    if (!physical_) throw std::logic_error("field has no physical representation");
    return *physical_;
  }
  const ComplexArray& spectral() const {
    if (!spectral_) throw std::logic_error("field has no spectral representation");
    return *spectral_;
  }

  double at(std::size_t i, std::size_t j) const { return physical()[i * grid_->ny() + j]; }

  Field& operator+=(const Field& o) {
    if (!grid_->same_shape(o.grid())) throw ConfigError("cannot add fields on different grids");
    auto& a = mutable_physical();
    const auto& b = o.physical();
    for (std::size_t n = 0; n < a.size(); ++n) a[n] += b[n];
    return *this;
  }

  Field& operator*=(double s) {
    for (auto& v : mutable_physical()) v *= s;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

 private:
  Field(GridPtr grid, std::nullopt_t, std::nullopt_t) : grid_(std::move(grid)) {}

  RealArray& mutable_physical() {
    if (!physical_) throw std::logic_error("field has no physical representation");
    spectral_.reset();
    return *physical_;
  }

  friend Field to_spectral(const Field&);
  friend Field to_physical(const Field&);

  GridPtr grid_;
  std::optional<RealArray> physical_;
  std::optional<ComplexArray> spectral_;
};

/// Forward transform; the result carries both representations.
inline Field to_spectral(const Field& f) {
  if (f.has_spectral()) return f;
  const auto& u = f.physical();
  for (double v : u)
    if (!std::isfinite(v)) throw NumericalOverflow("non-finite value in physical field");
  ComplexArray c;
  transform_for(f.grid())->forward(u, c);
  Field out = f;
  out.spectral_ = std::move(c);
  return out;
}

inline Field to_physical(const Field& f) {
  if (f.has_physical()) return f;
  RealArray u;
  transform_for(f.grid())->inverse(f.spectral(), u);
  Field out = f;
  out.physical_ = std::move(u);
  return out;
}

/// Parseval weight of column k in the half layout.
inline double half_weight(const SpectralGrid& g, std::size_t k) {
  return (k == 0 || g.y_nyquist(k)) ? 1.0 : 2.0;
}

/// Sum of |c|^2 over the full spectrum represented by a half-layout array.
inline double spectral_sum_sq(const SpectralGrid& g, std::span<const complex> c) {
  const std::size_t nky = g.nky();
  double s = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t k = 0; k < nky; ++k) s += half_weight(g, k) * std::norm(c[i * nky + k]);
  return s;
}

/// Reconstructs the full nx*ny spectrum (x-major, transform order) from the
/// half layout using Hermitian symmetry.
inline std::vector<complex> full_spectrum(const Field& f) {
  const Field s = to_spectral(f);
  const auto& g = s.grid();
  const auto& c = s.spectral();
  const std::size_t nx = g.nx(), ny = g.ny(), nky = g.nky();
  std::vector<complex> full(nx * ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      if (j < nky) {
        full[i * ny + j] = c[i * nky + j];
      } else {
        const std::size_t im = (nx - i) % nx;
        full[i * ny + j] = std::conj(c[im * nky + (ny - j)]);
      }
    }
  return full;
}

/// Diagonal spectral operator stored on the half layout.
class Multiplier {
 public:
  Multiplier() = default;
  Multiplier(std::size_t nx, std::size_t ny, ComplexArray values) : nx_(nx), ny_(ny), values_(std::move(values)) {
    if (values_.size() != nx * (ny / 2 + 1)) throw ConfigError("multiplier size does not match grid");
  }

  /// Evaluates symbol(xi1, xi2, i, k) on every stored mode.
  template <class Symbol>
  static Multiplier from_symbol(const SpectralGrid& g, Symbol&& symbol) {
    ComplexArray v(g.spectral_size());
    const std::size_t nky = g.nky();
    for (std::size_t i = 0; i < g.nx(); ++i)
      for (std::size_t k = 0; k < nky; ++k) v[i * nky + k] = symbol(g.xi1()[i], g.xi2_half(k), i, k);
    return Multiplier(g.nx(), g.ny(), std::move(v));
  }

  /// From a full nx*ny array (x-major, transform order). The upper half in
  /// y is implied by Hermitian symmetry and is not read.
  static Multiplier from_full(const SpectralGrid& g, std::span<const complex> full) {
    if (full.size() != g.size()) throw ConfigError("multiplier shape does not match grid");
    return from_symbol(g, [&](double, double, std::size_t i, std::size_t k) { return full[i * g.ny() + k]; });
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  const ComplexArray& values() const { return values_; }
  complex operator[](std::size_t n) const { return values_[n]; }

  friend Multiplier operator*(const Multiplier& a, const Multiplier& b) {
    if (a.nx_ != b.nx_ || a.ny_ != b.ny_) throw ConfigError("multiplier shape mismatch");
    ComplexArray v(a.values_.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = a.values_[n] * b.values_[n];
    return Multiplier(a.nx_, a.ny_, std::move(v));
  }

 private:
  std::size_t nx_ = 0, ny_ = 0;
  ComplexArray values_;
};

/// Pointwise product in spectral space; the result is spectral-only.
inline Field apply_multiplier(const Field& f, const Multiplier& m) {
  const auto& g = f.grid();
  if (m.nx() != g.nx() || m.ny() != g.ny()) throw ConfigError("multiplier shape does not match field grid");
  const Field s = to_spectral(f);
  ComplexArray out(s.spectral());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] *= m[n];
  return Field::from_spectral(f.grid_ptr(), std::move(out));
}

/// (i xi1)^order. Odd orders vanish on the x-Nyquist row so real fields stay real.
inline Multiplier dx_multiplier(const SpectralGrid& g, int order = 1) {
  return Multiplier::from_symbol(g, [&](double k1, double, std::size_t i, std::size_t) {
    if (order % 2 != 0 && g.x_nyquist(i)) return complex(0.0);
    return std::pow(complex(0.0, k1), order);
  });
}

/// (i xi2)^order, zero on the y-Nyquist column for odd orders.
inline Multiplier dy_multiplier(const SpectralGrid& g, int order = 1) {
  return Multiplier::from_symbol(g, [&](double, double k2, std::size_t, std::size_t k) {
    if (order % 2 != 0 && g.y_nyquist(k)) return complex(0.0);
    return std::pow(complex(0.0, k2), order);
  });
}

/// Discrete integral of u^2 over the grid.
inline double l2_squared(const Field& f) {
  if (f.has_physical()) {
    double s = 0.0;
    for (double v : f.physical()) s += v * v;
    return s * f.grid().cell_area();
  }
  return f.grid().area() * spectral_sum_sq(f.grid(), f.spectral());
}

inline double l2_norm(const Field& f) { return std::sqrt(l2_squared(f)); }

inline double max_abs(const Field& f) {
  const Field p = to_physical(f);
  double m = 0.0;
  for (double v : p.physical()) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace kpsim
