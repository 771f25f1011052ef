#pragma once

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "kpsim/grid.hpp"

namespace kpsim {

using complex = std::complex<double>;

/// Allocator returning SIMD-aligned storage so that FFTW's new-array
/// execute functions can reuse a single plan for every buffer.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using RealArray = std::vector<double, FftwAllocator<double>>;
using ComplexArray = std::vector<complex, FftwAllocator<complex>>;

/// Thread count for FFTW, read once from KPSIM_THREADS (default 1).
inline int fft_threads() {
  static const int n = [] {
    const char* env = std::getenv("KPSIM_THREADS");
    if (env == nullptr) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
  }();
  return n;
}

/// Real-to-complex 2D transform pair for one grid shape.
///
/// forward() returns coefficients normalized by 1/(nx*ny), so the (0,0)
/// coefficient is the mean value. Plans are built with FFTW_ESTIMATE, which
/// makes the algorithm choice (and hence every rounding) reproducible.
class FourierTransform {
 public:
  FourierTransform(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
    RealArray r(nx * ny);
    ComplexArray c(nx * (ny / 2 + 1));
    const int n0 = static_cast<int>(nx);
    const int n1 = static_cast<int>(ny);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    forward_ = fftw_plan_dft_r2c_2d(n0, n1, r.data(), cp, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(n0, n1, cp, r.data(), FFTW_ESTIMATE);
    if (forward_ == nullptr || inverse_ == nullptr) throw std::runtime_error("FFTW plan creation failed");
  }
  ~FourierTransform() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  std::size_t spectral_size() const { return nx_ * (ny_ / 2 + 1); }
  std::size_t physical_size() const { return nx_ * ny_; }

  void forward(const RealArray& in, ComplexArray& out) const {
    out.resize(spectral_size());
    // out-of-place r2c preserves its input
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(nx_ * ny_);
    for (auto& v : out) v *= scale;
  }

  /// c2r destroys its input, so the spectrum is staged through `scratch`.
  void inverse(const ComplexArray& in, RealArray& out, ComplexArray& scratch) const {
    scratch.assign(in.begin(), in.end());
    out.resize(physical_size());
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  }

  void inverse(const ComplexArray& in, RealArray& out) const {
    ComplexArray scratch;
    inverse(in, out, scratch);
  }

 private:
  std::size_t nx_, ny_;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

/// Shared transform for a grid shape. Planning is serialized; execution is
/// thread-safe through the new-array interface.
inline std::shared_ptr<const FourierTransform> transform_for(std::size_t nx, std::size_t ny) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const FourierTransform>> cache;
  std::lock_guard lock(mutex);
  static const bool threads_ready = [] {
    if (fft_threads() > 1) {
      fftw_init_threads();
      fftw_plan_with_nthreads(fft_threads());
    }
    return true;
  }();
  (void)threads_ready;
  auto& slot = cache[{nx, ny}];
  if (!slot) slot = std::make_shared<const FourierTransform>(nx, ny);
  return slot;
}

inline std::shared_ptr<const FourierTransform> transform_for(const SpectralGrid& g) {
  return transform_for(g.nx(), g.ny());
}

}  // namespace kpsim
