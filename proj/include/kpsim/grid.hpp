#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "kpsim/error.hpp"

namespace kpsim {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Doubly periodic grid on [-pi Lx, pi Lx) x [-pi Ly, pi Ly).
///
/// Physical values are stored x-major: index i * ny + j, i over x, j over y.
/// Spectral coefficients use the real-to-complex half layout: index
/// i * nky + k with k in [0, ny/2]. Wavenumbers are xi1 = j / Lx with
/// j in {-nx/2, ..., nx/2 - 1}, stored in transform order.
class SpectralGrid {
 public:
  SpectralGrid(double lx, double ly, std::size_t nx, std::size_t ny)
      : lx_(lx), ly_(ly), nx_(nx), ny_(ny) {
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
      std::ostringstream os;
      os << "grid lengths must be positive and finite (Lx=" << lx << ", Ly=" << ly << ")";
      throw ConfigError(os.str());
    }
    if (nx < 2 || ny < 2 || !is_power_of_two(nx) || !is_power_of_two(ny)) {
      std::ostringstream os;
      os << "node counts must be powers of two >= 2 (Nx=" << nx << ", Ny=" << ny << ")";
      throw ConfigError(os.str());
    }
    const double pi = std::numbers::pi;
    x_.resize(nx);
    y_.resize(ny);
    xi1_.resize(nx);
    xi2_.resize(ny);
    for (std::size_t i = 0; i < nx; ++i) {
      x_[i] = -pi * lx + static_cast<double>(i) * dx();
      xi1_[i] = static_cast<double>(signed_index(i, nx)) / lx;
    }
    for (std::size_t j = 0; j < ny; ++j) {
      y_[j] = -pi * ly + static_cast<double>(j) * dy();
      xi2_[j] = static_cast<double>(signed_index(j, ny)) / ly;
    }
  }

  double lx() const { return lx_; }
  double ly() const { return ly_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nky() const { return ny_ / 2 + 1; }
  std::size_t size() const { return nx_ * ny_; }
  std::size_t spectral_size() const { return nx_ * nky(); }

  double dx() const { return 2.0 * std::numbers::pi * lx_ / static_cast<double>(nx_); }
  double dy() const { return 2.0 * std::numbers::pi * ly_ / static_cast<double>(ny_); }
  double cell_area() const { return dx() * dy(); }
  double area() const { return 4.0 * std::numbers::pi * std::numbers::pi * lx_ * ly_; }

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& xi1() const { return xi1_; }
  const std::vector<double>& xi2() const { return xi2_; }

  /// xi2 for a column of the half layout (k = ny/2 is the Nyquist mode -ny/2).
  double xi2_half(std::size_t k) const { return xi2_[k]; }

  bool x_nyquist(std::size_t i) const { return i == nx_ / 2; }
  bool y_nyquist(std::size_t k) const { return k == ny_ / 2; }

  /// Signed mode number of transform index i for n points.
  static long signed_index(std::size_t i, std::size_t n) {
    return i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
  }

  bool same_shape(const SpectralGrid& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_;
  }

 private:
  double lx_, ly_;
  std::size_t nx_, ny_;
  std::vector<double> x_, y_, xi1_, xi2_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

inline GridPtr make_grid(double lx, double ly, std::size_t nx, std::size_t ny) {
  return std::make_shared<const SpectralGrid>(lx, ly, nx, ny);
}

}  // namespace kpsim
