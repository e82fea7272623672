#ifndef UDE_EXPERIMENTS_HPP
#define UDE_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ude/metrics.hpp"
#include "ude/train.hpp"

namespace ude {

enum class ExperimentId {
  e1_rc,
  e1_sir,
  e2_rc,
  e2_sir,
  e3_linear,
  e3_eoh,
  e4_nonlinear,
  e4_horizon
};

const char* experiment_name(ExperimentId id);
ExperimentId experiment_from_name(const std::string& name);
std::vector<std::string> experiment_names();

/// Partial TrainConfig; unset fields keep the experiment's defaults.
struct TrainOverrides {
  std::optional<Regime> regime;
  std::optional<double> learning_rate;
  std::optional<int> iters_per_step;
  std::optional<int> max_epochs;

  void apply(TrainConfig& config) const;
};

struct ExperimentSpec {
  ExperimentId id = ExperimentId::e1_rc;
  std::size_t n_trials = 100;
  std::uint64_t seed = 0;
  /// Iterations per step (E2), multiples of tau_max (E3-eoh) or training
  /// weeks (E4-horizon). Empty for single-cell experiments and E1.
  std::vector<double> sweep_values;
  TrainOverrides overrides;

  /// Spec with the default sweep grid for `id`.
  static ExperimentSpec defaults(ExperimentId id);
  bool is_sweep() const;
  void validate() const;
};

struct ResultRow {
  std::string experiment_id;
  std::string sweep_value;  // empty when the experiment has a single cell
  std::string metric;
  AggregateStats stats;     // NaN fields and n = 0 when every trial failed
  std::size_t n_failed = 0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kMetricNames[] = {
    "ae_tau", "ae_vs", "ae_beta", "ae_a", "rmse_state", "rmse_beta_series",
    "wall_time_s"};

struct RunOptions {
  unsigned jobs = 1;
  bool keep_models = false;
  bool keep_datasets = false;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  nlohmann::json trials = nlohmann::json::array();  // one record per fit
  nlohmann::json summary = nlohmann::json::array(); // raw and pooled AE
  nlohmann::json manifest;
  nlohmann::json models = nlohmann::json::array();
  nlohmann::json datasets = nlohmann::json::object();

  /// True if some cell has no successful trial.
  bool any_cell_failed() const;
};

enum class RcOrSir { rc, sir };
enum class E3Mode { fit, eoh_sweep };
enum class E4Mode { fit, horizon_sweep };

ExperimentOutput run_e1(RcOrSir which, const ExperimentSpec& spec,
                        const RunOptions& options);
ExperimentOutput run_e2(RcOrSir which, const ExperimentSpec& spec,
                        const RunOptions& options);
ExperimentOutput run_e3(E3Mode mode, const ExperimentSpec& spec,
                        const RunOptions& options);
ExperimentOutput run_e4(E4Mode mode, const ExperimentSpec& spec,
                        const RunOptions& options);
/// Dispatches on spec.id.
ExperimentOutput run_experiment(const ExperimentSpec& spec,
                                const RunOptions& options);

enum class OutputFormat { csv, json };
OutputFormat format_from_name(const std::string& name);

std::string results_to_csv(const std::vector<ResultRow>& rows);
nlohmann::json results_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_json(const nlohmann::json& j);

/// Writes `rows` to `path`; throws std::runtime_error naming the path on
/// failure.
void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                  const std::filesystem::path& path);

/// Writes results, trial records, summary, manifest and the optional model
/// and dataset documents under `dir`, prefixed with the experiment id.
/// Returns the path of the results file.
std::filesystem::path write_output(const ExperimentOutput& out,
                                   const ExperimentSpec& spec,
                                   OutputFormat format,
                                   const std::filesystem::path& dir);

}  // namespace ude

#endif  // UDE_EXPERIMENTS_HPP
