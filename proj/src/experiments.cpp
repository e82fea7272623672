#include "ude/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ude/approximators.hpp"
#include "ude/datagen.hpp"
#include "ude/random.hpp"
#include "ude/system.hpp"

namespace ude {

namespace {

constexpr const char* kNames[] = {"E1-rc",     "E1-sir",       "E2-rc",
                                  "E2-sir",    "E3-linear",    "E3-eoh",
                                  "E4-nonlinear", "E4-horizon"};

// Seed streams. Datasets, initial guesses and shuffles draw from disjoint
// streams of the experiment seed so that changing one never moves another.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kInitStream = 1000;
constexpr std::uint64_t kShuffleStream = 1000000;

constexpr double kMlpLearningRate = 0.002;
constexpr int kMlpMaxEpochs = 3000;

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Metric {
  std::string name;
  double value = 0.0;
};

// Outcome of one fit in one cell.
struct TrialOutcome {
  bool failed = false;
  std::vector<Metric> metrics;
  nlohmann::json record;
  nlohmann::json model;
  // Raw absolute errors and true values, for the summary document.
  std::vector<Metric> raw_errors;
  std::vector<Metric> truths;
};

struct Cell {
  std::string sweep_value;
  std::function<TrialOutcome(std::size_t trial)> run;
};

nlohmann::json params_json(const std::vector<std::string>& names,
                           const std::vector<double>& values) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t k = 0; k < names.size(); ++k) j[names[k]] = values[k];
  return j;
}

// Runs every (cell, trial) task on `jobs` threads; results are stored by
// index so the reduction below never depends on completion order.
std::vector<std::vector<TrialOutcome>> run_cells(const std::vector<Cell>& cells,
                                                 std::size_t n_trials,
                                                 unsigned jobs) {
  std::vector<std::vector<TrialOutcome>> out(
      cells.size(), std::vector<TrialOutcome>(n_trials));
  const std::size_t n_tasks = cells.size() * n_trials;
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const std::size_t c = task / n_trials;
      const std::size_t k = task % n_trials;
      try {
        out[c][k] = cells[c].run(k);
      } catch (const TrialFailure& e) {
        TrialOutcome& o = out[c][k];
        o.failed = true;
        o.record = {{"trial_id", k}, {"failed", true}, {"error", e.what()}};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n_tasks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

AggregateStats failed_stats() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  AggregateStats s;
  s.mean = s.std = s.min = s.median = s.max = nan;
  s.n = 0;
  return s;
}

void reduce(const std::string& id, const std::vector<Cell>& cells,
            const std::vector<std::vector<TrialOutcome>>& outcomes,
            const std::vector<std::string>& metric_names,
            ExperimentOutput& out) {
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t n_failed = 0;
    std::map<std::string, std::vector<double>> values, raw, truth;
    for (const auto& o : outcomes[c]) {
      if (o.failed) {
        ++n_failed;
        continue;
      }
      for (const auto& m : o.metrics) values[m.name].push_back(m.value);
      for (const auto& m : o.raw_errors) raw[m.name].push_back(m.value);
      for (const auto& m : o.truths) truth[m.name].push_back(m.value);
    }
    for (const auto& name : metric_names) {
      ResultRow row{id, cells[c].sweep_value, name, failed_stats(), n_failed};
      if (!values[name].empty()) row.stats = aggregate(values[name]);
      out.rows.push_back(row);
    }
    for (const auto& [name, errs] : raw) {
      const auto& tv = truth[name];
      double err_sum = 0.0, truth_sum = 0.0;
      for (std::size_t k = 0; k < errs.size(); ++k) {
        err_sum += errs[k];
        truth_sum += std::abs(tv[k]);
      }
      out.summary.push_back({{"sweep_value", cells[c].sweep_value},
                             {"metric", name},
                             {"raw", to_json(aggregate(errs))},
                             {"pooled_normalized", err_sum / truth_sum}});
    }
    for (std::size_t k = 0; k < outcomes[c].size(); ++k) {
      nlohmann::json rec = outcomes[c][k].record;
      rec["sweep_value"] = cells[c].sweep_value;
      out.trials.push_back(std::move(rec));
      if (!outcomes[c][k].model.is_null()) {
        out.models.push_back({{"sweep_value", cells[c].sweep_value},
                              {"trial_id", k},
                              {"model", outcomes[c][k].model}});
      }
    }
  }
}

nlohmann::json config_json(const TrainConfig& c) {
  return {{"regime", regime_name(c.regime)},
          {"optimizer", optimizer_name(c.optimizer)},
          {"learning_rate", c.learning_rate},
          {"max_epochs", c.max_epochs},
          {"convergence_tol", c.convergence_tol},
          {"patience", c.patience},
          {"iters_per_step", c.euler.iters_per_step},
          {"shuffle", c.shuffle}};
}

nlohmann::json base_manifest(const ExperimentSpec& spec) {
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t k = 0; k < spec.n_trials; ++k) {
    seeds.push_back({{"trial_id", k},
                     {"init_seed", mix_seed(spec.seed, kInitStream + k)},
                     {"shuffle_seed", mix_seed(spec.seed, kShuffleStream + k)}});
  }
  return {{"experiment_id", experiment_name(spec.id)},
          {"n_trials", spec.n_trials},
          {"seed", spec.seed},
          {"sweep_values", spec.sweep_values},
          {"trial_seeds", seeds},
          {"datasets", nlohmann::json::array()}};
}

template <class DatasetSpec, class Instances>
void record_dataset(const std::string& name, const DatasetSpec& dspec,
                    std::uint64_t seed, const Instances& data,
                    const RunOptions& options, ExperimentOutput& out) {
  const nlohmann::json doc = dataset_to_json(dspec, seed, data);
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(dataset_hash(doc)));
  out.manifest["datasets"].push_back(
      {{"name", name}, {"spec", to_json(dspec)}, {"seed", seed}, {"hash", hash}});
  if (options.keep_datasets) out.datasets[name] = doc;
}

TrainConfig trial_config(TrainConfig base, const ExperimentSpec& spec,
                         std::size_t trial) {
  base.seed = mix_seed(spec.seed, kShuffleStream + trial);
  return base;
}

std::uint64_t init_seed(const ExperimentSpec& spec, std::size_t trial) {
  return mix_seed(spec.seed, kInitStream + trial);
}

nlohmann::json fit_record(std::size_t trial, const ExperimentSpec& spec,
                          const TrainConfig& config, const FitReport& rep) {
  return {{"trial_id", trial},
          {"failed", false},
          {"seed", config.seed},
          {"init_seed", init_seed(spec, trial)},
          {"regime", regime_name(config.regime)},
          {"iters_per_step", config.euler.iters_per_step},
          {"wall_time_s", rep.wall_time_s},
          {"epochs", rep.epochs_run},
          {"converged", rep.converged},
          {"final_cost", rep.cost_history.empty() ? 0.0 : rep.cost_history.back()}};
}

// Constant-parameter fit shared by E1 and E2.
struct ConstCase {
  OdeSystem system;
  std::vector<std::string> names;      // ODE parameter names
  std::vector<std::string> ae_metrics; // one per parameter
  InitRanges ranges;
};

ConstCase rc_case() {
  ConstCase c{OdeSystem::rc(), {"tau", "v_s"}, {"ae_tau", "ae_vs"}, {}};
  const RcDatasetSpec d;
  c.ranges.const_ranges = {d.tau_range, d.v_s_range};
  c.ranges.const_transforms = {Transform::positive, Transform::identity};
  return c;
}

ConstCase sir_case() {
  const SirDatasetSpec d;
  ConstCase c{OdeSystem::sir(d.gamma), {"beta"}, {"ae_beta"}, {}};
  c.ranges.const_ranges = {d.beta_range};
  c.ranges.const_transforms = {Transform::unit};
  return c;
}

TrialOutcome const_trial(const ConstCase& cc, const TimeSeries& data,
                         const std::vector<double>& truth,
                         const ExperimentSpec& spec, const TrainConfig& config,
                         std::size_t trial, bool keep_model) {
  const Approximator init =
      approx_init(Family::constant, init_seed(spec, trial), cc.ranges);
  const FitReport rep = fit(cc.system, init, data, config);
  const auto est = std::get<ConstApprox>(rep.fitted).natural();
  const auto start = std::get<ConstApprox>(init).natural();
  const auto pred = rollout_eval(cc.system, rep.fitted, data, config.euler);

  TrialOutcome o;
  nlohmann::json ae_norm = nlohmann::json::object();
  nlohmann::json ae_raw = nlohmann::json::object();
  for (std::size_t p = 0; p < truth.size(); ++p) {
    const double raw = absolute_error(est[p], truth[p], 1.0);
    const double norm = absolute_error(est[p], truth[p], std::abs(truth[p]));
    o.metrics.push_back({cc.ae_metrics[p], norm});
    o.raw_errors.push_back({cc.ae_metrics[p], raw});
    o.truths.push_back({cc.ae_metrics[p], truth[p]});
    ae_raw[cc.names[p]] = raw;
    ae_norm[cc.names[p]] = norm;
  }
  const double rm = rmse(pred, data, state_range(data));
  o.metrics.push_back({"rmse_state", rm});
  o.metrics.push_back({"wall_time_s", rep.wall_time_s});
  o.record = fit_record(trial, spec, config, rep);
  o.record["initial_params"] = params_json(cc.names, start);
  o.record["estimated_params"] = params_json(cc.names, est);
  o.record["true_params"] = params_json(cc.names, truth);
  o.record["ae_raw"] = ae_raw;
  o.record["ae_normalized"] = ae_norm;
  o.record["rmse_state"] = rm;
  if (keep_model) o.model = approx_to_json(rep.fitted);
  return o;
}

struct ConstData {
  std::vector<TimeSeries> series;
  std::vector<std::vector<double>> truths;
};

ConstData const_data(RcOrSir which, const ExperimentSpec& spec,
                     const RunOptions& options, ExperimentOutput& out) {
  ConstData d;
  const std::uint64_t seed = mix_seed(spec.seed, kDataStream);
  if (which == RcOrSir::rc) {
    RcDatasetSpec ds;
    ds.n_instances = spec.n_trials;
    const auto data = gen_rc_dataset(ds, seed);
    record_dataset("rc", ds, seed, data, options, out);
    for (const auto& inst : data) {
      d.series.push_back(inst.series);
      d.truths.push_back({inst.truth.tau, inst.truth.v_s});
    }
  } else {
    SirDatasetSpec ds;
    ds.n_instances = spec.n_trials;
    const auto data = gen_sir_dataset(ds, seed);
    record_dataset("sir", ds, seed, data, options, out);
    for (const auto& inst : data) {
      d.series.push_back(inst.series);
      d.truths.push_back({inst.beta});
    }
  }
  return d;
}

std::vector<std::string> const_metrics(const ConstCase& cc) {
  std::vector<std::string> m = cc.ae_metrics;
  m.push_back("rmse_state");
  m.push_back("wall_time_s");
  return m;
}

}  // namespace

const char* experiment_name(ExperimentId id) {
  return kNames[static_cast<int>(id)];
}

ExperimentId experiment_from_name(const std::string& name) {
  for (int k = 0; k < 8; ++k) {
    if (name == kNames[k]) return static_cast<ExperimentId>(k);
  }
  throw std::invalid_argument("unknown experiment id: " + name);
}

std::vector<std::string> experiment_names() {
  return {std::begin(kNames), std::end(kNames)};
}

void TrainOverrides::apply(TrainConfig& config) const {
  if (regime) config.regime = *regime;
  if (learning_rate) config.learning_rate = *learning_rate;
  if (iters_per_step) config.euler.iters_per_step = *iters_per_step;
  if (max_epochs) config.max_epochs = *max_epochs;
}

ExperimentSpec ExperimentSpec::defaults(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  switch (id) {
    case ExperimentId::e2_rc:
    case ExperimentId::e2_sir:
      s.sweep_values = {1, 2, 5, 10, 20, 50, 100};
      break;
    case ExperimentId::e3_eoh:
      s.sweep_values = {0.5, 1, 1.5, 2, 3, 4, 5};
      break;
    case ExperimentId::e4_horizon:
      s.sweep_values = {5, 10, 15, 20};
      break;
    default:
      break;
  }
  return s;
}

bool ExperimentSpec::is_sweep() const {
  return id == ExperimentId::e2_rc || id == ExperimentId::e2_sir ||
         id == ExperimentId::e3_eoh || id == ExperimentId::e4_horizon;
}

void ExperimentSpec::validate() const {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (is_sweep() && sweep_values.empty()) {
    throw std::invalid_argument("sweep experiment needs sweep values");
  }
  for (double v : sweep_values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("sweep values must be positive");
    }
  }
  if (id == ExperimentId::e2_rc || id == ExperimentId::e2_sir) {
    for (double v : sweep_values) {
      if (v != std::floor(v)) {
        throw std::invalid_argument("iterations per step must be integers");
      }
    }
  }
  if (overrides.learning_rate && !(*overrides.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (overrides.iters_per_step && *overrides.iters_per_step < 1) {
    throw std::invalid_argument("iterations per step must be >= 1");
  }
}

bool ExperimentOutput::any_cell_failed() const {
  for (const auto& r : rows) {
    if (r.stats.n == 0) return true;
  }
  return false;
}

ExperimentOutput run_e1(RcOrSir which, const ExperimentSpec& spec,
                        const RunOptions& options) {
  spec.validate();
  ExperimentOutput out;
  out.manifest = base_manifest(spec);
  const ConstCase cc = which == RcOrSir::rc ? rc_case() : sir_case();
  const ConstData data = const_data(which, spec, options, out);

  std::vector<Regime> regimes{Regime::mini_batch, Regime::full_batch};
  if (spec.overrides.regime) regimes = {*spec.overrides.regime};
  std::vector<Cell> cells;
  std::vector<TrainConfig> configs;
  for (Regime r : regimes) {
    TrainConfig c;
    spec.overrides.apply(c);
    c.regime = r;
    configs.push_back(c);
  }
  for (const auto& c : configs) {
    cells.push_back({regime_name(c.regime), [&, c](std::size_t k) {
                       return const_trial(cc, data.series[k], data.truths[k],
                                          spec, trial_config(c, spec, k), k,
                                          options.keep_models);
                     }});
    out.manifest["train_configs"].push_back(config_json(c));
  }
  reduce(experiment_name(spec.id), cells,
         run_cells(cells, spec.n_trials, options.jobs), const_metrics(cc), out);
  return out;
}

ExperimentOutput run_e2(RcOrSir which, const ExperimentSpec& spec,
                        const RunOptions& options) {
  spec.validate();
  ExperimentOutput out;
  out.manifest = base_manifest(spec);
  const ConstCase cc = which == RcOrSir::rc ? rc_case() : sir_case();
  const ConstData data = const_data(which, spec, options, out);

  TrainConfig base;
  spec.overrides.apply(base);
  out.manifest["train_configs"].push_back(config_json(base));
  std::vector<Cell> cells;
  for (double v : spec.sweep_values) {
    TrainConfig c = base;
    c.euler.iters_per_step = static_cast<int>(v);
    cells.push_back({format_value(v), [&, c](std::size_t k) {
                       return const_trial(cc, data.series[k], data.truths[k],
                                          spec, trial_config(c, spec, k), k,
                                          options.keep_models);
                     }});
  }
  reduce(experiment_name(spec.id), cells,
         run_cells(cells, spec.n_trials, options.jobs), const_metrics(cc), out);
  return out;
}

ExperimentOutput run_e3(E3Mode mode, const ExperimentSpec& spec,
                        const RunOptions& options) {
  spec.validate();
  ExperimentOutput out;
  out.manifest = base_manifest(spec);
  WalkDatasetSpec ds;
  ds.n_instances = spec.n_trials;
  const std::uint64_t seed = mix_seed(spec.seed, kDataStream);
  const auto data = gen_tau_walk_dataset(ds, seed);
  record_dataset("tau_walk", ds, seed, data, options, out);

  const OdeSystem system = OdeSystem::rc_linear(ds.v_s);
  InitRanges ranges;
  ranges.linear_range = ds.a_range;
  TrainConfig base;
  spec.overrides.apply(base);
  out.manifest["train_configs"].push_back(config_json(base));

  // Trains on the window [0, factor * tau_max]; errors are measured on the
  // full-horizon curve.
  auto trial = [&, base](std::size_t k, double factor) {
    const WalkInstance& inst = data[k];
    const TrainConfig config = trial_config(base, spec, k);
    const TimeSeries train =
        factor == ds.horizon_factor
            ? inst.series
            : eoh_subsample(inst, factor * inst.walk.tau_max(),
                            ds.n_steps + 1, ds);
    const Approximator init =
        approx_init(Family::linear, init_seed(spec, k), ranges);
    const FitReport rep = fit(system, init, train, config);
    const double a = get_params(rep.fitted)[0];
    const double truth = inst.walk.a;
    const auto pred = rollout_eval(system, rep.fitted, inst.series, config.euler);
    TrialOutcome o;
    const double raw = absolute_error(a, truth, 1.0);
    const double norm = absolute_error(a, truth, truth);
    const double rm = rmse(pred, inst.series, state_range(inst.series));
    o.metrics = {{"ae_a", norm}, {"rmse_state", rm},
                 {"wall_time_s", rep.wall_time_s}};
    o.raw_errors = {{"ae_a", raw}};
    o.truths = {{"ae_a", truth}};
    o.record = fit_record(k, spec, config, rep);
    o.record["eoh_factor"] = factor;
    o.record["initial_params"] = {{"a", get_params(init)[0]}};
    o.record["estimated_params"] = {{"a", a}};
    o.record["true_params"] = {{"a", truth}};
    o.record["ae_raw"] = {{"a", raw}};
    o.record["ae_normalized"] = {{"a", norm}};
    o.record["rmse_state"] = rm;
    if (options.keep_models) o.model = approx_to_json(rep.fitted);
    return o;
  };

  std::vector<Cell> cells;
  if (mode == E3Mode::fit) {
    cells.push_back({"", [&](std::size_t k) { return trial(k, ds.horizon_factor); }});
  } else {
    for (double v : spec.sweep_values) {
      if (v > ds.horizon_factor) {
        throw std::invalid_argument("EOH factor beyond the generated horizon");
      }
      cells.push_back({format_value(v), [&, v](std::size_t k) { return trial(k, v); }});
    }
  }
  reduce(experiment_name(spec.id), cells,
         run_cells(cells, spec.n_trials, options.jobs),
         {"ae_a", "rmse_state", "wall_time_s"}, out);
  return out;
}

ExperimentOutput run_e4(E4Mode mode, const ExperimentSpec& spec,
                        const RunOptions& options) {
  spec.validate();
  ExperimentOutput out;
  out.manifest = base_manifest(spec);
  NpiDatasetSpec ds;
  ds.n_instances = spec.n_trials;
  const std::uint64_t seed = mix_seed(spec.seed, kDataStream);
  const auto data = gen_npi_dataset(ds, seed);
  record_dataset("npi", ds, seed, data, options, out);

  const OdeSystem system = OdeSystem::sir_npi(ds.gamma);
  const InitRanges ranges;
  TrainConfig base;
  base.learning_rate = kMlpLearningRate;
  base.max_epochs = kMlpMaxEpochs;
  spec.overrides.apply(base);
  out.manifest["train_configs"].push_back(config_json(base));
  const double full_weeks = ds.horizon_days / 7.0;

  // Trains on n_points samples regenerated over the first `weeks` weeks;
  // both errors are measured on the full curve.
  auto trial = [&, base](std::size_t k, double weeks) {
    const NpiInstance& inst = data[k];
    const TrainConfig config = trial_config(base, spec, k);
    const TimeSeries train =
        weeks == full_weeks
            ? inst.series
            : npi_series(inst.schedule, weeks * 7.0, ds.n_points, ds);
    const Approximator init = approx_init(Family::mlp, init_seed(spec, k), ranges);
    const FitReport rep = fit(system, init, train, config);
    const auto pred = rollout_eval(system, rep.fitted, inst.series, config.euler);
    const auto params = parameter_series(system, rep.fitted, inst.series, config.euler);
    std::vector<double> beta_pred, beta_true;
    const auto truth = beta_series(inst.schedule, inst.series.times);
    for (std::size_t p = 0; p < params.size(); ++p) {
      beta_pred.push_back(params[p][0]);
      beta_true.push_back(truth[p]);
    }
    const double beta_hat = inst.schedule.effect.beta_hat;
    TrialOutcome o;
    const double rm = rmse(pred, inst.series, state_range(inst.series));
    const double rb = rmse(beta_pred, beta_true, beta_hat);
    o.metrics = {{"rmse_state", rm}, {"rmse_beta_series", rb},
                 {"wall_time_s", rep.wall_time_s}};
    o.record = fit_record(k, spec, config, rep);
    o.record["training_weeks"] = weeks;
    o.record["true_params"] = {{"beta_hat", beta_hat},
                               {"e1", inst.schedule.effect.e[0]},
                               {"e2", inst.schedule.effect.e[1]}};
    o.record["beta_series_true"] = beta_true;
    o.record["beta_series_estimated"] = beta_pred;
    o.record["rmse_state"] = rm;
    o.record["rmse_beta_series"] = rb;
    o.record["rmse_beta_series_raw"] = rmse(beta_pred, beta_true, 1.0);
    if (options.keep_models) o.model = approx_to_json(rep.fitted);
    return o;
  };

  std::vector<Cell> cells;
  if (mode == E4Mode::fit) {
    cells.push_back({"", [&](std::size_t k) { return trial(k, full_weeks); }});
  } else {
    for (double v : spec.sweep_values) {
      if (v > full_weeks) {
        throw std::invalid_argument("training horizon beyond the data");
      }
      cells.push_back({format_value(v), [&, v](std::size_t k) { return trial(k, v); }});
    }
  }
  reduce(experiment_name(spec.id), cells,
         run_cells(cells, spec.n_trials, options.jobs),
         {"rmse_state", "rmse_beta_series", "wall_time_s"}, out);
  return out;
}

ExperimentOutput run_experiment(const ExperimentSpec& spec,
                                const RunOptions& options) {
  switch (spec.id) {
    case ExperimentId::e1_rc: return run_e1(RcOrSir::rc, spec, options);
    case ExperimentId::e1_sir: return run_e1(RcOrSir::sir, spec, options);
    case ExperimentId::e2_rc: return run_e2(RcOrSir::rc, spec, options);
    case ExperimentId::e2_sir: return run_e2(RcOrSir::sir, spec, options);
    case ExperimentId::e3_linear: return run_e3(E3Mode::fit, spec, options);
    case ExperimentId::e3_eoh: return run_e3(E3Mode::eoh_sweep, spec, options);
    case ExperimentId::e4_nonlinear: return run_e4(E4Mode::fit, spec, options);
    case ExperimentId::e4_horizon:
      return run_e4(E4Mode::horizon_sweep, spec, options);
  }
  throw std::invalid_argument("unknown experiment");
}

OutputFormat format_from_name(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format: " + name);
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "experiment_id,sweep_value,metric,mean,std,min,median,max,n,n_failed\n";
  for (const auto& r : rows) {
    os << r.experiment_id << ',' << r.sweep_value << ',' << r.metric << ','
       << format_number(r.stats.mean) << ',' << format_number(r.stats.std) << ','
       << format_number(r.stats.min) << ',' << format_number(r.stats.median)
       << ',' << format_number(r.stats.max) << ',' << r.stats.n << ','
       << r.n_failed << '\n';
  }
  return os.str();
}

nlohmann::json results_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = to_json(r.stats);
    j["experiment_id"] = r.experiment_id;
    j["sweep_value"] = r.sweep_value;
    j["metric"] = r.metric;
    j["n_failed"] = r.n_failed;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<ResultRow> results_from_json(const nlohmann::json& j) {
  auto num = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                       : v.get<double>();
  };
  std::vector<ResultRow> rows;
  for (const auto& e : j) {
    ResultRow r;
    r.experiment_id = e.at("experiment_id").get<std::string>();
    r.sweep_value = e.at("sweep_value").get<std::string>();
    r.metric = e.at("metric").get<std::string>();
    r.stats.mean = num(e.at("mean"));
    r.stats.std = num(e.at("std"));
    r.stats.min = num(e.at("min"));
    r.stats.median = num(e.at("median"));
    r.stats.max = num(e.at("max"));
    r.stats.n = e.at("n").get<std::size_t>();
    r.n_failed = e.at("n_failed").get<std::size_t>();
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
  f.close();
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                  const std::filesystem::path& path) {
  write_text(path, format == OutputFormat::csv
                       ? results_to_csv(rows)
                       : results_to_json(rows).dump(2) + "\n");
}

std::filesystem::path write_output(const ExperimentOutput& out,
                                   const ExperimentSpec& spec,
                                   OutputFormat format,
                                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create directory " + dir.string() + ": " +
                             ec.message());
  }
  const std::string id = experiment_name(spec.id);
  const auto results =
      dir / (id + (format == OutputFormat::csv ? "_results.csv" : "_results.json"));
  emit_results(out.rows, format, results);
  write_text(dir / (id + "_trials.json"), out.trials.dump(2) + "\n");
  write_text(dir / (id + "_summary.json"), out.summary.dump(2) + "\n");
  write_text(dir / (id + "_manifest.json"), out.manifest.dump(2) + "\n");
  if (!out.models.empty()) {
    write_text(dir / (id + "_models.json"), out.models.dump() + "\n");
  }
  if (!out.datasets.empty()) {
    write_text(dir / (id + "_datasets.json"), out.datasets.dump() + "\n");
  }
  return results;
}

}  // namespace ude
