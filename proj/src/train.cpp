#include "ude/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "ude/random.hpp"

namespace ude {

const char* regime_name(Regime r) {
  return r == Regime::full_batch ? "full-batch" : "mini-batch";
}

Regime regime_from_name(const std::string& name) {
  if (name == "full" || name == "full-batch") return Regime::full_batch;
  if (name == "mini" || name == "mini-batch") return Regime::mini_batch;
  throw std::invalid_argument("unknown regime '" + name + "'");
}

const char* optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "sgd") return OptimizerKind::sgd;
  throw std::invalid_argument("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("TrainConfig: learning rate must be positive");
  }
  if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs < 1");
  if (!(convergence_tol >= 0.0)) {
    throw std::invalid_argument("TrainConfig: convergence_tol < 0");
  }
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience < 1");
  euler.validate();
}

TimeSeries Pair::as_series() const {
  TimeSeries s;
  s.times = {t_i, t_ip1};
  s.states = {y_i, y_ip1};
  if (!exogenous_i.empty()) s.exogenous = {exogenous_i, exogenous_i};
  return s;
}

std::vector<Pair> split_pairs(const TimeSeries& series) {
  if (series.size() < 2) {
    throw std::invalid_argument("split_pairs: need at least 2 points");
  }
  series.validate();
  std::vector<Pair> pairs;
  pairs.reserve(series.size() - 1);
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    Pair p;
    p.t_i = series.times[k];
    p.t_ip1 = series.times[k + 1];
    p.y_i = series.states[k];
    p.y_ip1 = series.states[k + 1];
    if (series.has_exogenous()) p.exogenous_i = series.exogenous[k];
    pairs.push_back(std::move(p));
  }
  return pairs;
}

namespace {

double taped_cost(Tape& tape, const OdeSystem& system,
                  const Approximator& approx, std::span<const double> params,
                  const TimeSeries& data, const EulerConfig& euler,
                  std::vector<double>& gradient) {
  tape.clear();
  const auto theta = tape.leaves(params);
  const std::vector<Var> initial(data.states[0].begin(), data.states[0].end());
  const auto traj = rollout<Var>(system, approx, theta, initial, data.times,
                                 data.exogenous, euler);
  const Var cost = mse_cost(traj, data);
  gradient = tape.gradient(cost);
  return cost.value();
}

// Rethrows numerical breakdowns of a single fit as TrialFailure.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const DivergenceError& e) {
    throw TrialFailure(e.what());
  } catch (const ParameterDomainError& e) {
    throw TrialFailure(e.what());
  } catch (const NonFiniteError& e) {
    throw TrialFailure(e.what());
  }
}

// Counts epochs whose relative cost improvement falls below `tol`; stops
// after `patience` such epochs in a row. Improvement is measured against the
// previous epoch or against the best epoch so far.
class StopRule {
 public:
  StopRule(double tol, int patience, bool against_best)
      : tol_(tol), patience_(patience), against_best_(against_best) {}

  bool update(double cost) {
    if (cost == 0.0) return true;
    if (has_ref_) {
      const double rel = (ref_ - cost) / std::max(std::abs(ref_), 1e-300);
      stall_ = rel < tol_ ? stall_ + 1 : 0;
      ref_ = against_best_ ? std::min(ref_, cost) : cost;
    } else {
      ref_ = cost;
      has_ref_ = true;
    }
    return stall_ >= patience_;
  }

 private:
  double tol_;
  int patience_;
  bool against_best_;
  double ref_ = 0.0;
  bool has_ref_ = false;
  int stall_ = 0;
};

bool stop_against_best(const TrainConfig& c, const TimeSeries& data) {
  switch (c.stop_reference) {
    case StopReference::previous: return false;
    case StopReference::best: return true;
    case StopReference::automatic: break;
  }
  // A single pair gives a deterministic epoch cost, as in full-batch.
  return c.regime == Regime::mini_batch && data.size() > 2;
}

class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& c) : config_(c) {}

  void step(std::span<double> params, std::span<const double> grads) {
    for (double g : grads) {
      if (!std::isfinite(g)) throw TrialFailure("non-finite gradient");
    }
    if (config_.optimizer == OptimizerKind::adam) {
      adam_step(params, grads, adam_, config_.learning_rate);
    } else {
      sgd_step(params, grads, config_.learning_rate);
    }
    for (double p : params) {
      if (!std::isfinite(p)) throw TrialFailure("non-finite parameter update");
    }
  }

 private:
  const TrainConfig& config_;
  AdamState adam_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void check_data(const OdeSystem& system, const TimeSeries& data) {
  data.validate();
  if (data.size() < 2) throw std::invalid_argument("fit: need >= 2 points");
  if (data.state_dim() != system.state_dim()) {
    throw StructuralError("fit: data state dimension does not match system");
  }
  if (system.exogenous_dim() > 0 && !data.has_exogenous()) {
    throw StructuralError("fit: system needs exogenous inputs");
  }
}

}  // namespace

double trajectory_cost(const OdeSystem& system, const Approximator& approx,
                       std::span<const double> params, const TimeSeries& data,
                       const EulerConfig& euler) {
  const auto traj = rollout<double>(system, approx, params, data.states[0],
                                    data.times, data.exogenous, euler);
  return mse_cost(traj, data);
}

double trajectory_cost_gradient(const OdeSystem& system,
                                const Approximator& approx,
                                std::span<const double> params,
                                const TimeSeries& data,
                                const EulerConfig& euler,
                                std::vector<double>& gradient) {
  Tape tape;
  return taped_cost(tape, system, approx, params, data, euler, gradient);
}

double pairwise_cost(const OdeSystem& system, const Approximator& approx,
                     const TimeSeries& data, const EulerConfig& euler) {
  const auto params = get_params(approx);
  double total = 0.0;
  for (const auto& p : split_pairs(data)) {
    total += trajectory_cost(system, approx, params, p.as_series(), euler);
  }
  return total;
}

Trajectory<double> one_step_predictions(const OdeSystem& system,
                                        const Approximator& approx,
                                        const TimeSeries& data,
                                        const EulerConfig& euler) {
  Trajectory<double> out;
  for (const auto& p : split_pairs(data)) {
    const auto s = p.as_series();
    const auto t = rollout(system, approx, s.states[0], s.times, s.exogenous,
                           euler);
    out.times.push_back(p.t_ip1);
    out.states.push_back(t.states[1]);
  }
  return out;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& s, double lr) {
  if (params.size() != grads.size()) {
    throw StructuralError("adam_step: parameter and gradient sizes differ");
  }
  if (s.m.size() != params.size()) {
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
  }
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    s.m[k] = s.beta1 * s.m[k] + (1.0 - s.beta1) * g;
    s.v[k] = s.beta2 * s.v[k] + (1.0 - s.beta2) * g * g;
    const double m_hat = s.m[k] / c1;
    const double v_hat = s.v[k] / c2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

void sgd_step(std::span<double> params, std::span<const double> grads,
              double lr) {
  if (params.size() != grads.size()) {
    throw StructuralError("sgd_step: parameter and gradient sizes differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr * grads[k];
}

FitReport fit_full_batch(const OdeSystem& system, const Approximator& init,
                         const TimeSeries& data, const TrainConfig& config) {
  config.validate();
  check_data(system, data);
  const auto t0 = std::chrono::steady_clock::now();
  FitReport rep;
  rep.fitted = init;
  rep.initial_params = get_params(init);
  std::vector<double> params = rep.initial_params;
  Tape tape;
  std::vector<double> grads;
  Optimizer opt(config);
  StopRule stop(config.convergence_tol, config.patience,
                stop_against_best(config, data));
  guarded([&] {
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      const double cost =
          taped_cost(tape, system, init, params, data, config.euler, grads);
      if (!std::isfinite(cost)) throw TrialFailure("non-finite cost");
      opt.step(params, grads);
      if (config.record_trace) rep.param_trace.push_back(params);
      rep.cost_history.push_back(cost);
      rep.epochs_run = epoch;
      if (stop.update(cost)) {
        rep.converged = true;
        break;
      }
    }
    return 0;
  });
  rep.estimated_params = params;
  set_params(rep.fitted, params);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

FitReport fit_mini_batch(const OdeSystem& system, const Approximator& init,
                         const TimeSeries& data, const TrainConfig& config) {
  config.validate();
  check_data(system, data);
  const auto t0 = std::chrono::steady_clock::now();
  FitReport rep;
  rep.fitted = init;
  rep.initial_params = get_params(init);
  std::vector<double> params = rep.initial_params;
  std::vector<TimeSeries> pairs;
  for (const auto& p : split_pairs(data)) pairs.push_back(p.as_series());
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  Tape tape;
  std::vector<double> grads;
  Optimizer opt(config);
  StopRule stop(config.convergence_tol, config.patience,
                stop_against_best(config, data));
  guarded([&] {
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      if (config.shuffle) rng.shuffle(order);
      double total = 0.0;
      for (std::size_t k : order) {
        total += taped_cost(tape, system, init, params, pairs[k], config.euler,
                            grads);
        opt.step(params, grads);
        if (config.record_trace) rep.param_trace.push_back(params);
      }
      if (!std::isfinite(total)) throw TrialFailure("non-finite cost");
      rep.cost_history.push_back(total);
      rep.epochs_run = epoch;
      if (stop.update(total)) {
        rep.converged = true;
        break;
      }
    }
    return 0;
  });
  rep.estimated_params = params;
  set_params(rep.fitted, params);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

FitReport fit(const OdeSystem& system, const Approximator& init,
              const TimeSeries& data, const TrainConfig& config) {
  return config.regime == Regime::full_batch
             ? fit_full_batch(system, init, data, config)
             : fit_mini_batch(system, init, data, config);
}

Trajectory<double> rollout_eval(const OdeSystem& system,
                                const Approximator& fitted,
                                const TimeSeries& data,
                                const EulerConfig& euler) {
  return guarded([&] {
    return rollout(system, fitted, data.states[0], data.times, data.exogenous,
                   euler);
  });
}

std::vector<std::vector<double>> parameter_series(const OdeSystem& system,
                                                  const Approximator& fitted,
                                                  const TimeSeries& data,
                                                  const EulerConfig& euler) {
  const auto traj = rollout_eval(system, fitted, data, euler);
  const auto theta = get_params(fitted);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const std::span<const double> exog =
        system.exogenous_dim() > 0 ? std::span<const double>(data.exogenous[i])
                                   : std::span<const double>();
    std::vector<double> p(system.ode_param_dim());
    system.step_params<double>(fitted, theta, traj.states[i], exog, p);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ude
