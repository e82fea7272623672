#ifndef UDE_INTEGRATE_HPP
#define UDE_INTEGRATE_HPP

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ude/series.hpp"
#include "ude/system.hpp"

namespace ude {

struct EulerConfig {
  int iters_per_step = 10;

  void validate() const;
};

/// A state component became NaN or infinite during integration.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long grid_index, long substep, const std::string& what)
      : std::runtime_error(what), grid_index_(grid_index), substep_(substep) {}
  /// Measurement interval in which divergence happened, -1 if unknown.
  long grid_index() const { return grid_index_; }
  long substep() const { return substep_; }

 private:
  long grid_index_;
  long substep_;
};

/// Applies `iters` updates u <- u + h * f(u) with h = span / iters. `rhs` is
/// called as rhs(std::span<const T> u, std::span<T> dudt).
template <class T, class Rhs>
void euler_advance(const Rhs& rhs, std::span<T> state, double span, int iters) {
  if (!(span > 0.0)) throw std::invalid_argument("euler_advance: span <= 0");
  if (iters < 1) throw std::invalid_argument("euler_advance: iters < 1");
  const double h = span / iters;
  const std::size_t n = state.size();
  T dudt[3];
  std::vector<T> big;
  std::span<T> d(dudt, n <= 3 ? n : 0);
  if (n > 3) {
    big.resize(n);
    d = big;
  }
  for (int k = 0; k < iters; ++k) {
    rhs(std::span<const T>(state.data(), n), d);
    for (std::size_t c = 0; c < n; ++c) {
      state[c] = state[c] + T(h) * d[c];
      if (!std::isfinite(value_of(state[c]))) {
        std::ostringstream msg;
        msg << "euler_advance: non-finite state at sub-step " << k;
        throw DivergenceError(-1, k, msg.str());
      }
    }
  }
}

template <class T, class Rhs>
void euler_advance(const Rhs& rhs, std::span<T> state, double span,
                   const EulerConfig& config) {
  euler_advance<T>(rhs, state, span, config.iters_per_step);
}

/// Rolls `system` forward over `grid` from `initial`. The approximator is
/// evaluated once at the start of each measurement interval; exogenous input
/// i (if any) is held constant over [grid[i], grid[i+1]).
template <class T>
Trajectory<T> rollout(const OdeSystem& system, const Approximator& approx,
                      std::span<const T> theta, std::span<const T> initial,
                      std::span<const double> grid,
                      std::span<const std::vector<double>> exogenous,
                      const EulerConfig& config) {
  config.validate();
  if (initial.size() != system.state_dim()) {
    throw StructuralError("rollout: initial state has wrong dimension");
  }
  if (system.exogenous_dim() > 0 && exogenous.size() + 1 < grid.size()) {
    throw StructuralError("rollout: exogenous inputs not aligned to grid");
  }
  Trajectory<T> traj;
  traj.times.assign(grid.begin(), grid.end());
  traj.states.reserve(grid.size());
  std::vector<T> state(initial.begin(), initial.end());
  traj.states.push_back(state);
  std::vector<T> params(system.ode_param_dim());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const std::span<const double> exog =
        system.exogenous_dim() > 0 ? std::span<const double>(exogenous[i])
                                   : std::span<const double>();
    system.step_params<T>(approx, theta, state, exog, params);
    auto f = [&](std::span<const T> u, std::span<T> dudt) {
      system.rhs<T>(u, params, dudt);
    };
    try {
      euler_advance<T>(f, std::span<T>(state), grid[i + 1] - grid[i], config);
    } catch (const DivergenceError& e) {
      std::ostringstream msg;
      msg << "rollout: divergence in interval " << i << " at sub-step "
          << e.substep();
      throw DivergenceError(static_cast<long>(i), e.substep(), msg.str());
    }
    traj.states.push_back(state);
  }
  return traj;
}

/// Convenience overload using the approximator's stored parameters.
Trajectory<double> rollout(const OdeSystem& system, const Approximator& approx,
                           std::span<const double> initial,
                           std::span<const double> grid,
                           std::span<const std::vector<double>> exogenous,
                           const EulerConfig& config);

}  // namespace ude

#endif  // UDE_INTEGRATE_HPP
