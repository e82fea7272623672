#ifndef UDE_SYSTEM_HPP
#define UDE_SYSTEM_HPP

#include <span>
#include <string>
#include <vector>

#include "ude/approximators.hpp"
#include "ude/dynamics.hpp"

namespace ude {

enum class SystemKind {
  rc,         // state [v_c]; approximator -> (tau, v_s)
  sir,        // state [s, i, r]; approximator -> beta; gamma known
  rc_linear,  // state [v_c]; approximator(x) -> tau; v_s known
  sir_npi,    // state [s, i, r]; approximator(s, i, r, x1, x2) -> beta
};

const char* system_name(SystemKind k);

/// Known dynamics f with a slot for the learnable term U_theta. The
/// approximator is evaluated once per measurement interval to obtain the ODE
/// parameters, which are then held fixed across the Euler sub-steps.
struct OdeSystem {
  SystemKind kind = SystemKind::rc;
  double gamma = 0.1;
  double v_s = 1.0;

  static OdeSystem rc() { return {SystemKind::rc}; }
  static OdeSystem sir(double gamma) { return {SystemKind::sir, gamma}; }
  static OdeSystem rc_linear(double v_s) {
    return {SystemKind::rc_linear, 0.0, v_s};
  }
  static OdeSystem sir_npi(double gamma) {
    return {SystemKind::sir_npi, gamma};
  }

  std::size_t state_dim() const;
  std::size_t exogenous_dim() const;
  std::size_t ode_param_dim() const;
  /// Names of the ODE parameters produced by step_params.
  std::vector<std::string> param_names() const;

  /// ODE parameters for the interval starting at `state`, with exogenous
  /// inputs `exog` (empty for systems without observables).
  template <class T>
  void step_params(const Approximator& approx, std::span<const T> theta,
                   std::span<const T> state, std::span<const double> exog,
                   std::span<T> out) const {
    switch (kind) {
      case SystemKind::rc:
      case SystemKind::sir:
        approx_eval<T>(approx, theta, {}, out);
        return;
      case SystemKind::rc_linear: {
        const T x[1] = {T(exog[0])};
        approx_eval<T>(approx, theta, x, out);
        return;
      }
      case SystemKind::sir_npi: {
        const T in[5] = {state[0], state[1], state[2], T(exog[0]),
                         T(exog[1])};
        approx_eval<T>(approx, theta, in, out);
        return;
      }
    }
  }

  template <class T>
  void rhs(std::span<const T> u, std::span<const T> p,
           std::span<T> dudt) const {
    switch (kind) {
      case SystemKind::rc:
        dudt[0] = rc_rhs(u[0], p[0], p[1]);
        return;
      case SystemKind::rc_linear:
        dudt[0] = rc_rhs(u[0], p[0], T(v_s));
        return;
      case SystemKind::sir:
      case SystemKind::sir_npi: {
        const auto d = sir_rhs(u[0], u[1], p[0], T(gamma));
        dudt[0] = d[0];
        dudt[1] = d[1];
        dudt[2] = d[2];
        return;
      }
    }
  }
};

}  // namespace ude

#endif  // UDE_SYSTEM_HPP
