#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "kpsim/field.hpp"
#include "kpsim/params.hpp"

namespace kpsim {

/// L(xi) = i xi1^3 - eps i xi2^2 / xi1 so that u_hat_t = L u_hat + N(u_hat).
///
/// Under `project` the xi1 = 0 column is 0. Under `tiny_shift` the singular
/// factor uses xi1 + i eps delta, which keeps Re L <= 0 on that column for
/// both signs of eps. The x-Nyquist row is 0 (L is odd in xi1).
inline Multiplier linear_symbol(const SpectralGrid& g, const KPParams& params) {
  const double eps = params.epsilon;
  const bool shift = params.zero_mode.kind == ZeroModeKind::tiny_shift;
  const double delta = params.zero_mode.shift;
  return Multiplier::from_symbol(g, [&](double k1, double k2, std::size_t i, std::size_t) -> complex {
    if (g.x_nyquist(i)) return 0.0;
    const complex i1(0.0, 1.0);
    if (shift) return i1 * k1 * k1 * k1 - eps * i1 * k2 * k2 / complex(k1, eps * delta);
    if (k1 == 0.0) return 0.0;
    return i1 * (k1 * k1 * k1 - eps * k2 * k2 / k1);
  });
}

/// d_x^{-1} = -i / xi1 under the zero-mode policy (0 on the xi1 = 0 column
/// when projecting, 0 on the x-Nyquist row).
inline Multiplier inverse_dx_multiplier(const SpectralGrid& g, const ZeroModePolicy& policy, int epsilon = 1) {
  const bool shift = policy.kind == ZeroModeKind::tiny_shift;
  return Multiplier::from_symbol(g, [&](double k1, double, std::size_t i, std::size_t) -> complex {
    if (g.x_nyquist(i)) return 0.0;
    if (shift) return complex(0.0, -1.0) / complex(k1, epsilon * policy.shift);
    if (k1 == 0.0) return 0.0;
    return complex(0.0, -1.0 / k1);
  });
}

/// Mask for the 2/3 rule: 1 for |j| <= nx/3 and |k| <= ny/3.
inline std::vector<unsigned char> dealias_mask(const SpectralGrid& g) {
  std::vector<unsigned char> mask(g.spectral_size());
  const std::size_t nky = g.nky();
  const double jmax = static_cast<double>(g.nx()) / 3.0;
  const double kmax = static_cast<double>(g.ny()) / 3.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double j = std::abs(static_cast<double>(SpectralGrid::signed_index(i, g.nx())));
    for (std::size_t k = 0; k < nky; ++k) {
      const double kk = g.y_nyquist(k) ? static_cast<double>(g.ny() / 2) : static_cast<double>(k);
      mask[i * nky + k] = (j <= jmax && kk <= kmax) ? 1 : 0;
    }
  }
  return mask;
}

/// Right-hand side of the KP flow for one grid: the linear symbol and the
/// nonlinear term N(u_hat) = -(i xi1 / (p+1)) F[u^(p+1)].
///
/// Holds workspace, so one instance must not be used from two threads.
class KPOperator {
 public:
  KPOperator(GridPtr grid, const KPParams& params)
      : grid_(std::move(grid)), params_(params), fft_(transform_for(*grid_)), power_(params.p + 1) {
    params_.validate();
    linear_ = linear_symbol(*grid_, params_);
    const double inv = 1.0 / power_.value();
    nl_factor_ = Multiplier::from_symbol(*grid_, [&](double k1, double, std::size_t i, std::size_t) -> complex {
      if (grid_->x_nyquist(i)) return 0.0;
      return complex(0.0, -k1 * inv);
    });
    if (params_.dealias) mask_ = dealias_mask(*grid_);
  }

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const KPParams& params() const { return params_; }
  const Multiplier& linear() const { return linear_; }

  /// out = N(u_hat). Throws NumericalOverflow on a non-finite power.
  void nonlinear(const ComplexArray& uhat, ComplexArray& out) {
    const std::size_t n = grid_->spectral_size();
    out.resize(n);
    if (!params_.nonlinear) {
      std::fill(out.begin(), out.end(), complex(0.0));
      return;
    }
    if (params_.dealias) {
      tmp_.assign(uhat.begin(), uhat.end());
      for (std::size_t m = 0; m < n; ++m)
        if (!mask_[m]) tmp_[m] = 0.0;
      fft_->inverse(tmp_, u_, scratch_);
    } else {
      fft_->inverse(uhat, u_, scratch_);
    }
    bool finite = true;
    for (auto& v : u_) {
      v = signed_pow(v, power_);
      finite = finite && std::isfinite(v);
    }
    if (!finite) throw NumericalOverflow("non-finite value in nonlinear term");
    fft_->forward(u_, out);
    const auto& f = nl_factor_.values();
    for (std::size_t m = 0; m < n; ++m) out[m] *= f[m];
    if (params_.dealias)
      for (std::size_t m = 0; m < n; ++m)
        if (!mask_[m]) out[m] = 0.0;
  }

 private:
  GridPtr grid_;
  KPParams params_;
  std::shared_ptr<const FourierTransform> fft_;
  Rational power_;
  Multiplier linear_;
  Multiplier nl_factor_;
  std::vector<unsigned char> mask_;
  RealArray u_;
  ComplexArray scratch_, tmp_;
};

/// N(u_hat) for a single field (spectral-only result).
inline Field nonlinear_rhs(const Field& f, const KPParams& params) {
  KPOperator op(f.grid_ptr(), params);
  const Field s = to_spectral(f);
  ComplexArray out;
  op.nonlinear(s.spectral(), out);
  return Field::from_spectral(f.grid_ptr(), std::move(out));
}

/// Zeroes the xi1 = 0, xi2 != 0 modes in place: xi2^2 u_hat(0, xi2) = 0.
/// The mean (0, 0) is left alone; it is conserved by the flow.
inline void project_constraint_inplace(ComplexArray& c, const SpectralGrid& g) {
  for (std::size_t k = 1; k < g.nky(); ++k) c[k] = 0.0;
}

/// Enforces the zero-mass constraint. Idempotent.
inline Field project_constraint(const Field& f) {
  const Field s = to_spectral(f);
  ComplexArray c(s.spectral());
  project_constraint_inplace(c, f.grid());
  return Field::from_spectral(f.grid_ptr(), std::move(c));
}

/// Largest constrained coefficient (xi1 = 0, xi2 != 0) relative to max |u_hat|.
inline double constraint_violation(const SpectralGrid& g, const ComplexArray& c) {
  double zero_col = 0.0, all = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double a = std::abs(c[n]);
    all = std::max(all, a);
    if (n > 0 && n < g.nky()) zero_col = std::max(zero_col, a);
  }
  return all > 0.0 ? zero_col / all : 0.0;
}

/// Exact solution of the linear KP equation: u_hat(t) = u_hat(0) exp(t L).
inline Field linear_propagate(const Field& f, double t, const KPParams& params) {
  const Multiplier L = linear_symbol(f.grid(), params);
  const Field s = to_spectral(f);
  ComplexArray c(s.spectral());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= std::exp(t * L[n]);
  return Field::from_spectral(f.grid_ptr(), std::move(c));
}

/// Discrete L2 norm of the travelling-wave residual
///   R = c psi_xx - (psi^(p+1)/(p+1))_xx - psi_xxxx - eps psi_yy
/// (for p = 1, eps = -1 the solitary-wave equation of the KP I lump).
inline double sw_residual(const Field& psi, double c, const KPParams& params) {
  const auto& g = psi.grid();
  const Field p = to_physical(psi);
  const Field s = to_spectral(p);
  const Rational e = params.p + 1;
  RealArray w(g.size());
  const auto& u = p.physical();
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = signed_pow(u[n], e) / e.value();
  ComplexArray wh;
  transform_for(g)->forward(w, wh);
  const auto& uh = s.spectral();
  ComplexArray r(g.spectral_size());
  const std::size_t nky = g.nky();
  const double eps = params.epsilon;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double k1 = g.xi1()[i];
    const double k1s = k1 * k1;
    for (std::size_t k = 0; k < nky; ++k) {
      const double k2 = g.xi2_half(k);
      const std::size_t m = i * nky + k;
      r[m] = (-c * k1s - k1s * k1s + eps * k2 * k2) * uh[m] + k1s * wh[m];
    }
  }
  return std::sqrt(g.area() * spectral_sum_sq(g, r));
}

}  // namespace kpsim
