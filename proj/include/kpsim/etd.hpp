#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "kpsim/field.hpp"
#include "kpsim/model.hpp"

namespace kpsim {

/// Contour-quadrature settings for the phi-function weights.
struct ContourOptions {
  int points = 64;
  double radius = 1.0;
  double direct_threshold = 0.5;  // |dt L| above this uses the closed forms
};

/// Per-mode ETDRK4 (Cox-Matthews) weights for one step size.
struct EtdWeights {
  complex e, e2, q, f1, f2, f3;
};

namespace detail {
struct PhiTerms {
  complex q, f1, f2, f3;  // divided by dt
};

inline PhiTerms phi_direct(complex z) {
  const complex ez = std::exp(z);
  const complex z3 = z * z * z;
  return {(std::exp(z / 2.0) - 1.0) / z,
          (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3,
          2.0 * (2.0 + z + ez * (z - 2.0)) / z3,
          (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3};
}
}  // namespace detail

/// Weights for a single mode with z = dt * L. Near z = 0 the closed forms
/// cancel catastrophically, so they are averaged over a circle around z
/// (mean-value property of entire functions).
inline EtdWeights etd_weights(complex z, double dt, const ContourOptions& opt = {}) {
  detail::PhiTerms t{};
  if (std::abs(z) > opt.direct_threshold) {
    t = detail::phi_direct(z);
  } else {
    for (int k = 0; k < opt.points; ++k) {
      const double theta = 2.0 * std::numbers::pi * (k + 0.5) / opt.points;
      const auto p = detail::phi_direct(z + opt.radius * std::polar(1.0, theta));
      t.q += p.q;
      t.f1 += p.f1;
      t.f2 += p.f2;
      t.f3 += p.f3;
    }
    const double inv = 1.0 / opt.points;
    t.q *= inv, t.f1 *= inv, t.f2 *= inv, t.f3 *= inv;
  }
  return {std::exp(z), std::exp(z / 2.0), dt * t.q, dt * t.f1, dt * t.f2, dt * t.f3};
}

/// Mode-wise ETDRK4 weights on the half spectral layout.
struct EtdCoefficients {
  double dt = 0.0;
  ComplexArray e, e2, q, f1, f2, f3;
};

inline EtdCoefficients etd_coefficients(const Multiplier& L, double dt, const ContourOptions& opt = {}) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const std::size_t n = L.values().size();
  EtdCoefficients c;
  c.dt = dt;
  for (auto* a : {&c.e, &c.e2, &c.q, &c.f1, &c.f2, &c.f3}) a->resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto w = etd_weights(dt * L[m], dt, opt);
    c.e[m] = w.e, c.e2[m] = w.e2, c.q[m] = w.q;
    c.f1[m] = w.f1, c.f2[m] = w.f2, c.f3[m] = w.f3;
  }
  return c;
}

struct StepState {
  double t = 0.0;
  ComplexArray u_hat;
  std::size_t step_index = 0;
};

/// ETDRK4 stepper for a fixed grid, parameter set, and step size. The
/// coefficients are built once; stage buffers are reused across steps.
class EtdStepper {
 public:
  EtdStepper(GridPtr grid, const KPParams& params, double dt, const ContourOptions& opt = {})
      : op_(std::move(grid), params), coeffs_(etd_coefficients(op_.linear(), dt, opt)) {}

  /// Reuses coefficients built for the same grid and parameters.
  EtdStepper(GridPtr grid, const KPParams& params, EtdCoefficients coeffs)
      : op_(std::move(grid), params), coeffs_(std::move(coeffs)) {
    if (coeffs_.e.size() != op_.grid().spectral_size()) throw ConfigError("coefficients do not match grid");
  }

  const EtdCoefficients& coefficients() const { return coeffs_; }
  const KPOperator& model() const { return op_; }
  double dt() const { return coeffs_.dt; }

  /// Advances s by one step. On a non-finite result s is left unchanged and
  /// NumericalOverflow carries the index of the failed step.
  void step(StepState& s) {
    const std::size_t n = s.u_hat.size();
    const auto& C = coeffs_;
    const auto& u = s.u_hat;
    try {
      op_.nonlinear(u, nu_);
      a_.resize(n);
      for (std::size_t m = 0; m < n; ++m) a_[m] = C.e2[m] * u[m] + C.q[m] * nu_[m];
      op_.nonlinear(a_, na_);
      b_.resize(n);
      for (std::size_t m = 0; m < n; ++m) b_[m] = C.e2[m] * u[m] + C.q[m] * na_[m];
      op_.nonlinear(b_, nb_);
      c_.resize(n);
      for (std::size_t m = 0; m < n; ++m) c_[m] = C.e2[m] * a_[m] + C.q[m] * (2.0 * nb_[m] - nu_[m]);
      op_.nonlinear(c_, nc_);
    } catch (const NumericalOverflow&) {
      throw NumericalOverflow(overflow_message(s), s.step_index + 1);
    }
    next_.resize(n);
    bool finite = true;
    for (std::size_t m = 0; m < n; ++m) {
      next_[m] = C.e[m] * u[m] + C.f1[m] * nu_[m] + C.f2[m] * (na_[m] + nb_[m]) + C.f3[m] * nc_[m];
      finite = finite && std::isfinite(next_[m].real()) && std::isfinite(next_[m].imag());
    }
    if (!finite) throw NumericalOverflow(overflow_message(s), s.step_index + 1);
    if (op_.params().zero_mode.kind == ZeroModeKind::project)
      project_constraint_inplace(next_, op_.grid());
    s.u_hat.swap(next_);
    s.t += C.dt;
    ++s.step_index;
  }

 private:
  std::string overflow_message(const StepState& s) const {
    std::ostringstream os;
    os << "non-finite solution in step " << s.step_index + 1 << " (t = " << s.t + coeffs_.dt << ")";
    return os.str();
  }

  KPOperator op_;
  EtdCoefficients coeffs_;
  ComplexArray nu_, na_, nb_, nc_, a_, b_, c_, next_;
};

/// One ETDRK4 step with precomputed coefficients.
inline StepState etdrk4_step(const StepState& s, const EtdCoefficients& coeffs, const GridPtr& grid,
                             const KPParams& params) {
  EtdStepper stepper(grid, params, coeffs);
  StepState out = s;
  stepper.step(out);
  return out;
}

enum class StopKind { delta_exceeded, nonfinite };

struct StopReason {
  StopKind kind;
  double t_stop;
  std::size_t step = 0;
};

inline const char* to_string(StopKind k) { return k == StopKind::delta_exceeded ? "delta_exceeded" : "nonfinite"; }

enum class StepControl { proceed, stop };

/// Called after every `cadence`-th accepted step (and once for the initial
/// state with step_index 0). Returning stop ends the run as delta_exceeded.
using StepObserver = std::function<StepControl(const StepState&)>;

struct IntegrationResult {
  StepState state;  // last accepted state
  std::optional<StopReason> stop;
};

inline StepState initial_state(const Field& u0, const KPParams& params) {
  const Field s = params.zero_mode.kind == ZeroModeKind::project ? project_constraint(u0) : to_spectral(u0);
  return StepState{0.0, s.spectral(), 0};
}

/// Runs nt uniform steps of size t_final / nt from u0.
inline IntegrationResult integrate(const Field& u0, double t_final, std::size_t nt, const KPParams& params,
                                   const StepObserver& observer = {}, std::size_t cadence = 1) {
  if (nt < 1) throw ConfigError("number of time steps must be at least 1");
  if (!(t_final > 0.0)) throw ConfigError("final time must be positive");
  if (cadence < 1) cadence = 1;
  const double dt = t_final / static_cast<double>(nt);
  EtdStepper stepper(u0.grid_ptr(), params, dt);
  IntegrationResult r{initial_state(u0, params), std::nullopt};
  if (observer && observer(r.state) == StepControl::stop) {
    r.stop = StopReason{StopKind::delta_exceeded, 0.0, 0};
    return r;
  }
  for (std::size_t k = 1; k <= nt; ++k) {
    try {
      stepper.step(r.state);
    } catch (const NumericalOverflow& e) {
      r.stop = StopReason{StopKind::nonfinite, std::min(t_final, r.state.t + dt), e.step()};
      return r;
    }
    if (k == nt) r.state.t = t_final;  // remove accumulated rounding in t
    if (observer && (k % cadence == 0 || k == nt) && observer(r.state) == StepControl::stop) {
      r.stop = StopReason{StopKind::delta_exceeded, r.state.t, k};
      return r;
    }
  }
  return r;
}

}  // namespace kpsim
