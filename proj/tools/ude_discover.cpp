// ude-discover: runs one experiment and writes its result tables.
//
//   ude-discover run <experiment-id> [--trials N] [--seed S] [--jobs J]
//       [--iters-per-step K] [--regime full|mini] [--lr X] [--out DIR]
//       [--format csv|json] [--save-model] [--save-datasets] [--config FILE]
//
// Exit status: 0 on success, 1 on I/O or configuration errors, 2 when every
// trial of some cell failed.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ude/experiments.hpp"

namespace {

struct Options {
  std::string experiment;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  int iters_per_step = 0;
  std::string regime;
  double lr = 0.0;
  std::string out = "results";
  std::string format = "csv";
  bool save_model = false;
  bool save_datasets = false;
  std::string config;
};

// Fills every option not given on the command line from the config file.
void apply_config(CLI::App& run, Options& o) {
  std::ifstream f(o.config);
  if (!f) throw std::runtime_error("cannot read config file " + o.config);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file " + o.config + ": " + e.what());
  }
  if (!j.is_object()) {
    throw std::runtime_error("config file " + o.config + " must hold an object");
  }
  auto fill = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    if (run.count(std::string("--") + key) > 0) return;
    j.at(key).get_to(target);
  };
  for (const auto& [key, _] : j.items()) {
    static const char* known[] = {"experiment", "trials", "seed", "jobs",
                                  "iters-per-step", "regime", "lr", "out",
                                  "format", "save-model", "save-datasets"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::runtime_error("config file: unknown key '" + key + "'");
  }
  if (o.experiment.empty() && j.contains("experiment")) {
    o.experiment = j.at("experiment").get<std::string>();
  }
  try {
    fill("trials", o.trials);
    fill("seed", o.seed);
    fill("jobs", o.jobs);
    fill("iters-per-step", o.iters_per_step);
    fill("regime", o.regime);
    fill("lr", o.lr);
    fill("out", o.out);
    fill("format", o.format);
    fill("save-model", o.save_model);
    fill("save-datasets", o.save_datasets);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file " + o.config + ": " + e.what());
  }
}

ude::ExperimentSpec make_spec(const Options& o) {
  if (o.experiment.empty()) throw std::invalid_argument("no experiment id given");
  ude::ExperimentSpec spec =
      ude::ExperimentSpec::defaults(ude::experiment_from_name(o.experiment));
  spec.n_trials = o.trials;
  spec.seed = o.seed;
  if (!o.regime.empty()) spec.overrides.regime = ude::regime_from_name(o.regime);
  if (o.lr != 0.0) spec.overrides.learning_rate = o.lr;
  if (o.iters_per_step != 0) spec.overrides.iters_per_step = o.iters_per_step;
  spec.validate();
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter discovery with universal differential equations"};
  app.require_subcommand(1);
  Options o;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  std::string ids;
  for (const auto& n : ude::experiment_names()) ids += (ids.empty() ? "" : ", ") + n;
  run->add_option("experiment", o.experiment, "Experiment id: " + ids);
  run->add_option("--trials", o.trials, "Trials per cell")->check(CLI::PositiveNumber);
  run->add_option("--seed", o.seed, "Experiment seed");
  run->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--iters-per-step", o.iters_per_step,
                  "Euler sub-steps per measurement interval")
      ->check(CLI::PositiveNumber);
  run->add_option("--regime", o.regime, "Training regime")
      ->check(CLI::IsMember({"full", "mini"}));
  run->add_option("--lr", o.lr, "Learning rate")->check(CLI::PositiveNumber);
  run->add_option("--out", o.out, "Output directory");
  run->add_option("--format", o.format, "Result table format")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--save-model", o.save_model, "Write fitted approximators");
  run->add_flag("--save-datasets", o.save_datasets, "Write generated datasets");
  run->add_option("--config", o.config, "JSON file supplying any option");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  ude::ExperimentSpec spec;
  ude::ExperimentOutput out;
  try {
    if (!o.config.empty()) apply_config(*run, o);
    if (o.regime != "" && o.regime != "full" && o.regime != "mini") {
      throw std::invalid_argument("regime must be full or mini");
    }
    spec = make_spec(o);
    ude::RunOptions ropts;
    ropts.jobs = o.jobs;
    ropts.keep_models = o.save_model;
    ropts.keep_datasets = o.save_datasets;
    const auto format = ude::format_from_name(o.format);
    out = ude::run_experiment(spec, ropts);
    const auto path = ude::write_output(out, spec, format, o.out);
    std::cout << path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "ude-discover: " << e.what() << '\n';
    return 1;
  }
  if (out.any_cell_failed()) {
    std::cerr << "ude-discover: every trial of some cell failed\n";
    return 2;
  }
  return 0;
}
