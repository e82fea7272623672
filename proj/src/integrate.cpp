#include "ude/integrate.hpp"

namespace ude {

void EulerConfig::validate() const {
  if (iters_per_step < 1) {
    throw std::invalid_argument("EulerConfig: iters_per_step must be >= 1");
  }
}

Trajectory<double> rollout(const OdeSystem& system, const Approximator& approx,
                           std::span<const double> initial,
                           std::span<const double> grid,
                           std::span<const std::vector<double>> exogenous,
                           const EulerConfig& config) {
  const auto theta = get_params(approx);
  return rollout<double>(system, approx, theta, initial, grid, exogenous,
                         config);
}

}  // namespace ude
