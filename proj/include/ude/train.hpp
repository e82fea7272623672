#ifndef UDE_TRAIN_HPP
#define UDE_TRAIN_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ude/approximators.hpp"
#include "ude/autodiff.hpp"
#include "ude/integrate.hpp"
#include "ude/series.hpp"
#include "ude/system.hpp"

namespace ude {

enum class Regime { full_batch, mini_batch };
enum class OptimizerKind { adam, sgd };

/// What an epoch cost is compared against when testing for convergence.
/// `automatic` uses the best epoch so far for mini-batch runs over more than
/// one pair, whose epoch costs are noisy, and the previous epoch otherwise.
enum class StopReference { automatic, previous, best };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);
const char* optimizer_name(OptimizerKind k);
OptimizerKind optimizer_from_name(const std::string& name);

struct TrainConfig {
  Regime regime = Regime::mini_batch;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.01;
  int max_epochs = 2000;
  double convergence_tol = 1e-7;  // relative epoch-cost improvement
  int patience = 20;
  StopReference stop_reference = StopReference::automatic;
  EulerConfig euler;
  std::uint64_t seed = 0;
  bool shuffle = true;       // reshuffle pairs every mini-batch epoch
  bool record_trace = false; // keep parameters after every update

  void validate() const;
};

/// Two consecutive measurements, treated as their own initial-value problem.
struct Pair {
  double t_i = 0.0;
  double t_ip1 = 0.0;
  std::vector<double> y_i;
  std::vector<double> y_ip1;
  std::vector<double> exogenous_i;

  TimeSeries as_series() const;
};

struct FitReport {
  Approximator fitted;
  std::vector<double> initial_params;
  std::vector<double> estimated_params;
  std::vector<double> cost_history;
  std::vector<std::vector<double>> param_trace;
  double wall_time_s = 0.0;
  int epochs_run = 0;
  bool converged = false;
};

/// A fit aborted because the model diverged or left its parameter domain.
class TrialFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sum over grid points of the squared Euclidean residual. Each point's
/// squared norm is formed first and then added to the running total, so a
/// sum of per-pair costs reproduces the cost of the concatenated series
/// bit for bit.
template <class T>
T mse_cost(const Trajectory<T>& pred, const TimeSeries& measured) {
  if (pred.size() != measured.size() || pred.times != measured.times) {
    throw StructuralError("mse_cost: prediction and data grids differ");
  }
  T cost(0.0);
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (pred.states[k].size() != measured.states[k].size()) {
      throw StructuralError("mse_cost: state dimension mismatch");
    }
    T point(0.0);
    for (std::size_t c = 0; c < pred.states[k].size(); ++c) {
      const T r = pred.states[k][c] - T(measured.states[k][c]);
      point = point + r * r;
    }
    cost = cost + point;
  }
  return cost;
}

std::vector<Pair> split_pairs(const TimeSeries& series);

/// Cost of a rollout from data.states[0] over the whole grid.
double trajectory_cost(const OdeSystem& system, const Approximator& approx,
                       std::span<const double> params, const TimeSeries& data,
                       const EulerConfig& euler);

/// Same cost with its exact gradient with respect to `params`.
double trajectory_cost_gradient(const OdeSystem& system,
                                const Approximator& approx,
                                std::span<const double> params,
                                const TimeSeries& data,
                                const EulerConfig& euler,
                                std::vector<double>& gradient);

/// Sum of per-pair one-interval costs in pair order at fixed parameters.
double pairwise_cost(const OdeSystem& system, const Approximator& approx,
                     const TimeSeries& data, const EulerConfig& euler);

/// One-step predictions y_i -> y_{i+1} for every pair, as a trajectory on
/// the grid without its first point.
Trajectory<double> one_step_predictions(const OdeSystem& system,
                                        const Approximator& approx,
                                        const TimeSeries& data,
                                        const EulerConfig& euler);

/// Bias-corrected first/second moment estimates.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr);
void sgd_step(std::span<double> params, std::span<const double> grads,
              double lr);

FitReport fit_full_batch(const OdeSystem& system, const Approximator& init,
                         const TimeSeries& data, const TrainConfig& config);
FitReport fit_mini_batch(const OdeSystem& system, const Approximator& init,
                         const TimeSeries& data, const TrainConfig& config);
/// Dispatches on config.regime.
FitReport fit(const OdeSystem& system, const Approximator& init,
              const TimeSeries& data, const TrainConfig& config);

/// Forecast of the whole series from its first state only, each step feeding
/// the next.
Trajectory<double> rollout_eval(const OdeSystem& system,
                                const Approximator& fitted,
                                const TimeSeries& data,
                                const EulerConfig& euler);

/// Per-interval ODE parameters along a fed-back forecast (e.g. the beta
/// series implied by a fitted network). Entry i belongs to interval i.
std::vector<std::vector<double>> parameter_series(const OdeSystem& system,
                                                  const Approximator& fitted,
                                                  const TimeSeries& data,
                                                  const EulerConfig& euler);

}  // namespace ude

#endif  // UDE_TRAIN_HPP
