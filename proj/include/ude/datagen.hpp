#ifndef UDE_DATAGEN_HPP
#define UDE_DATAGEN_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ude/dynamics.hpp"
#include "ude/series.hpp"

namespace ude {

using Interval = std::pair<double, double>;

// ---------------------------------------------------------------- RC circuit

struct RcDatasetSpec {
  std::size_t n_instances = 100;
  Interval v_s_range{5.0, 10.0};
  Interval tau_range{2.0, 6.0};
  std::size_t n_points = 10;
  double horizon_factor = 5.0;  // samples cover [0, horizon_factor * tau]
  double v0 = 0.0;

  void validate() const;
};

struct RcInstance {
  RcParams truth;
  double v0 = 0.0;
  TimeSeries series;
};

/// Closed-form capacitor voltage (v0 - v_s) e^{-t/tau} + v_s.
double rc_analytic(double t, const RcParams& params, double v0);

std::vector<RcInstance> gen_rc_dataset(const RcDatasetSpec& spec,
                                       std::uint64_t seed);

/// The same curve sampled at `n_points` equally spaced times on [0, eoh].
TimeSeries eoh_subsample(const RcInstance& inst, double eoh,
                         std::size_t n_points);

// ------------------------------------------------------------------- SIR

struct SirDatasetSpec {
  std::size_t n_instances = 100;
  Interval beta_range{0.2, 0.4};
  double gamma = 0.1;
  double s0 = 0.99;
  double i0 = 0.01;
  std::size_t days = 100;
  int oracle_iters = 10000;  // Euler sub-steps per day

  void validate() const;
};

struct SirInstance {
  double beta = 0.0;
  TimeSeries series;
};

/// High-resolution Euler SIR curve sampled on `grid` (days) with a
/// piecewise-constant infection rate `beta_of(t)`; each interval between
/// consecutive sample times or rate changes gets ceil(len * iters_per_day)
/// sub-steps. `breaks` lists the times at which beta_of may change.
std::vector<std::vector<double>> sir_oracle(
    const std::function<double(double)>& beta_of,
    double gamma, double s0, double i0, const std::vector<double>& grid,
    const std::vector<double>& breaks, int iters_per_day);

std::vector<std::vector<double>> sir_oracle_constant(
    double beta, double gamma, double s0, double i0,
    const std::vector<double>& grid, int iters_per_day);

std::vector<SirInstance> gen_sir_dataset(const SirDatasetSpec& spec,
                                         std::uint64_t seed);

// ------------------------------------------------- RC with tau(x) = a * x

/// Observable x and true slope a; x[k] drives measurement interval k.
struct ObservableWalk {
  std::vector<double> x;
  double a = 0.0;

  double tau_max() const;
};

struct WalkDatasetSpec {
  std::size_t n_instances = 100;
  Interval a_range{2.0, 6.0};
  std::size_t n_steps = 9;      // measurement intervals (n_steps + 1 points)
  double horizon_factor = 5.0;  // full horizon = horizon_factor * tau_max
  double v_s = 1.0;
  double v0 = 0.0;
  int oracle_iters = 10000;     // Euler sub-steps per measurement interval

  void validate() const;
};

struct WalkInstance {
  ObservableWalk walk;
  TimeSeries series;
};

/// x(0) = 1, x(k) = x(k-1) + U[0, 1].
ObservableWalk gen_walk(double a, std::size_t n_steps, std::uint64_t seed);

/// Charging curve for a walk sampled at `n_points` equally spaced times on
/// [0, horizon]; interval k uses tau = a * x[k].
TimeSeries walk_series(const ObservableWalk& walk, double horizon,
                       std::size_t n_points, const WalkDatasetSpec& spec);

std::vector<WalkInstance> gen_tau_walk_dataset(const WalkDatasetSpec& spec,
                                               std::uint64_t seed);

TimeSeries eoh_subsample(const WalkInstance& inst, double eoh,
                         std::size_t n_points, const WalkDatasetSpec& spec);

// --------------------------------------------------------- SIR with NPIs

struct NpiSchedule {
  std::vector<NpiVector> weekly;
  NpiEffect effect;
  double week_days = 7.0;

  std::size_t week_of(double t) const;
  const NpiVector& npis_at(double t) const;
  double beta_at(double t) const;
};

struct NpiDatasetSpec {
  std::size_t n_instances = 100;
  Interval beta_hat_range{0.2, 0.4};
  double gamma = 0.1;
  double s0 = 0.99;
  double i0 = 0.01;
  double horizon_days = 140.0;
  std::size_t n_points = 20;
  int oracle_iters = 10000;  // Euler sub-steps per day

  void validate() const;
};

struct NpiInstance {
  NpiSchedule schedule;
  TimeSeries series;
};

/// Schedule-driven curve sampled at `n_points` equally spaced times on
/// [0, horizon_days]; exogenous entry i holds the NPIs active at t_i.
TimeSeries npi_series(const NpiSchedule& schedule, double horizon_days,
                      std::size_t n_points, const NpiDatasetSpec& spec);

std::vector<NpiInstance> gen_npi_dataset(const NpiDatasetSpec& spec,
                                         std::uint64_t seed);

/// True beta at each grid time of `series`.
std::vector<double> beta_series(const NpiSchedule& schedule,
                                const std::vector<double>& times);

// ----------------------------------------------------------- serialization

nlohmann::json to_json(const RcDatasetSpec& s);
nlohmann::json to_json(const SirDatasetSpec& s);
nlohmann::json to_json(const WalkDatasetSpec& s);
nlohmann::json to_json(const NpiDatasetSpec& s);

nlohmann::json dataset_to_json(const RcDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<RcInstance>& data);
nlohmann::json dataset_to_json(const SirDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<SirInstance>& data);
nlohmann::json dataset_to_json(const WalkDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<WalkInstance>& data);
nlohmann::json dataset_to_json(const NpiDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<NpiInstance>& data);

/// FNV-1a over the compact serialization; stable across runs and platforms.
std::uint64_t dataset_hash(const nlohmann::json& dataset);

}  // namespace ude

#endif  // UDE_DATAGEN_HPP
