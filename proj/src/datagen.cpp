#include "ude/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ude/integrate.hpp"
#include "ude/random.hpp"

namespace ude {

namespace {

void check_interval(const Interval& r, const char* what) {
  if (!(r.first <= r.second)) {
    throw std::invalid_argument(std::string(what) + ": empty range");
  }
}

int segment_iters(double len, int iters_per_unit) {
  const double n = std::ceil(len * iters_per_unit - 1e-9);
  return std::max(1, static_cast<int>(n));
}

void check_window(double eoh, double horizon) {
  if (!(eoh > 0.0) || eoh > horizon * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "eoh_subsample: end of horizon must lie in (0, series horizon]");
  }
}

}  // namespace

// ---------------------------------------------------------------- RC circuit

void RcDatasetSpec::validate() const {
  check_interval(v_s_range, "RcDatasetSpec.v_s_range");
  check_interval(tau_range, "RcDatasetSpec.tau_range");
  if (!(tau_range.first > 0.0)) {
    throw std::invalid_argument("RcDatasetSpec: tau range must be positive");
  }
  if (n_points < 2) throw std::invalid_argument("RcDatasetSpec: n_points < 2");
  if (!(horizon_factor > 0.0)) {
    throw std::invalid_argument("RcDatasetSpec: horizon_factor <= 0");
  }
}

double rc_analytic(double t, const RcParams& params, double v0) {
  return v0 * std::exp(-t / params.tau) - params.v_s * std::expm1(-t / params.tau);
}

std::vector<RcInstance> gen_rc_dataset(const RcDatasetSpec& spec,
                                       std::uint64_t seed) {
  spec.validate();
  std::vector<RcInstance> out;
  out.reserve(spec.n_instances);
  for (std::size_t k = 0; k < spec.n_instances; ++k) {
    Rng rng(mix_seed(seed, k));
    const double v_s = rng.uniform(spec.v_s_range.first, spec.v_s_range.second);
    const double tau = rng.uniform(spec.tau_range.first, spec.tau_range.second);
    RcInstance inst{RcParams::make(tau, v_s), spec.v0, {}};
    inst.series.times = linspace(0.0, spec.horizon_factor * tau, spec.n_points);
    for (double t : inst.series.times) {
      inst.series.states.push_back({rc_analytic(t, inst.truth, spec.v0)});
    }
    out.push_back(std::move(inst));
  }
  return out;
}

TimeSeries eoh_subsample(const RcInstance& inst, double eoh,
                         std::size_t n_points) {
  check_window(eoh, inst.series.horizon());
  TimeSeries s;
  s.times = linspace(0.0, eoh, n_points);
  for (double t : s.times) {
    s.states.push_back({rc_analytic(t, inst.truth, inst.v0)});
  }
  return s;
}

// ------------------------------------------------------------------- SIR

void SirDatasetSpec::validate() const {
  check_interval(beta_range, "SirDatasetSpec.beta_range");
  if (!(s0 >= 0.0 && i0 >= 0.0 && s0 + i0 <= 1.0)) {
    throw std::invalid_argument("SirDatasetSpec: need s0 + i0 <= 1");
  }
  if (oracle_iters < 1) {
    throw std::invalid_argument("SirDatasetSpec: oracle_iters < 1");
  }
  if (days < 1) throw std::invalid_argument("SirDatasetSpec: days < 1");
}

std::vector<std::vector<double>> sir_oracle(
    const std::function<double(double)>& beta_of, double gamma, double s0,
    double i0, const std::vector<double>& grid,
    const std::vector<double>& breaks, int iters_per_day) {
  if (grid.empty()) return {};
  std::vector<double> events(grid.begin(), grid.end());
  for (double b : breaks) {
    if (b > grid.front() && b < grid.back()) events.push_back(b);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) {
                             return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a));
                           }),
               events.end());

  std::vector<std::vector<double>> states;
  states.reserve(grid.size());
  double u[3] = {s0, i0, 1.0 - s0 - i0};
  if (u[2] < 0.0 || std::abs(u[2]) < 1e-15) u[2] = 0.0;
  states.push_back({u[0], u[1], u[2]});
  std::size_t next_grid = 1;
  double t = events.front();
  for (std::size_t e = 1; e < events.size(); ++e) {
    const double len = events[e] - t;
    const double beta = beta_of(t);
    auto f = [&](std::span<const double> x, std::span<double> d) {
      const auto r = sir_rhs(x[0], x[1], beta, gamma);
      d[0] = r[0];
      d[1] = r[1];
      d[2] = r[2];
    };
    euler_advance<double>(f, std::span<double>(u, 3), len,
                          segment_iters(len, iters_per_day));
    t = events[e];
    if (next_grid < grid.size() &&
        std::abs(t - grid[next_grid]) <= 1e-12 * (1.0 + std::abs(t))) {
      states.push_back({u[0], u[1], u[2]});
      ++next_grid;
    }
  }
  return states;
}

std::vector<std::vector<double>> sir_oracle_constant(
    double beta, double gamma, double s0, double i0,
    const std::vector<double>& grid, int iters_per_day) {
  return sir_oracle([beta](double) { return beta; }, gamma, s0, i0, grid, {},
                    iters_per_day);
}

std::vector<SirInstance> gen_sir_dataset(const SirDatasetSpec& spec,
                                         std::uint64_t seed) {
  spec.validate();
  std::vector<double> grid(spec.days + 1);
  for (std::size_t d = 0; d <= spec.days; ++d) grid[d] = static_cast<double>(d);
  std::vector<SirInstance> out;
  out.reserve(spec.n_instances);
  for (std::size_t k = 0; k < spec.n_instances; ++k) {
    Rng rng(mix_seed(seed, k));
    SirInstance inst;
    inst.beta = rng.uniform(spec.beta_range.first, spec.beta_range.second);
    inst.series.times = grid;
    inst.series.states = sir_oracle_constant(inst.beta, spec.gamma, spec.s0,
                                             spec.i0, grid, spec.oracle_iters);
    out.push_back(std::move(inst));
  }
  return out;
}

// ------------------------------------------------- RC with tau(x) = a * x

double ObservableWalk::tau_max() const {
  return a * *std::max_element(x.begin(), x.end());
}

void WalkDatasetSpec::validate() const {
  check_interval(a_range, "WalkDatasetSpec.a_range");
  if (!(a_range.first > 0.0)) {
    throw std::invalid_argument("WalkDatasetSpec: a range must be positive");
  }
  if (n_steps < 2) throw std::invalid_argument("WalkDatasetSpec: n_steps < 2");
  if (!(horizon_factor > 0.0)) {
    throw std::invalid_argument("WalkDatasetSpec: horizon_factor <= 0");
  }
  if (oracle_iters < 1) {
    throw std::invalid_argument("WalkDatasetSpec: oracle_iters < 1");
  }
}

ObservableWalk gen_walk(double a, std::size_t n_steps, std::uint64_t seed) {
  Rng rng(seed);
  ObservableWalk w;
  w.a = a;
  w.x.resize(n_steps);
  w.x[0] = 1.0;
  for (std::size_t k = 1; k < n_steps; ++k) w.x[k] = w.x[k - 1] + rng.uniform();
  return w;
}

TimeSeries walk_series(const ObservableWalk& walk, double horizon,
                       std::size_t n_points, const WalkDatasetSpec& spec) {
  if (n_points < 2 || n_points - 1 > walk.x.size()) {
    throw std::invalid_argument("walk_series: walk too short for the grid");
  }
  TimeSeries s;
  s.times = linspace(0.0, horizon, n_points);
  double v = spec.v0;
  s.states.push_back({v});
  for (std::size_t k = 0; k + 1 < n_points; ++k) {
    const double tau = walk.a * walk.x[k];
    auto f = [&](std::span<const double> u, std::span<double> d) {
      d[0] = rc_rhs(u[0], tau, spec.v_s);
    };
    euler_advance<double>(f, std::span<double>(&v, 1),
                          s.times[k + 1] - s.times[k], spec.oracle_iters);
    s.states.push_back({v});
  }
  for (std::size_t k = 0; k < n_points; ++k) {
    s.exogenous.push_back({walk.x[std::min(k, walk.x.size() - 1)]});
  }
  return s;
}

std::vector<WalkInstance> gen_tau_walk_dataset(const WalkDatasetSpec& spec,
                                               std::uint64_t seed) {
  spec.validate();
  std::vector<WalkInstance> out;
  out.reserve(spec.n_instances);
  for (std::size_t k = 0; k < spec.n_instances; ++k) {
    const std::uint64_t s = mix_seed(seed, k);
    Rng rng(s);
    const double a = rng.uniform(spec.a_range.first, spec.a_range.second);
    WalkInstance inst;
    inst.walk = gen_walk(a, spec.n_steps, mix_seed(s, 1));
    inst.series = walk_series(inst.walk, spec.horizon_factor * inst.walk.tau_max(),
                              spec.n_steps + 1, spec);
    out.push_back(std::move(inst));
  }
  return out;
}

TimeSeries eoh_subsample(const WalkInstance& inst, double eoh,
                         std::size_t n_points, const WalkDatasetSpec& spec) {
  check_window(eoh, inst.series.horizon());
  return walk_series(inst.walk, eoh, n_points, spec);
}

// --------------------------------------------------------- SIR with NPIs

std::size_t NpiSchedule::week_of(double t) const {
  const auto w = static_cast<std::size_t>(std::floor(t / week_days));
  return std::min(w, weekly.size() - 1);
}

const NpiVector& NpiSchedule::npis_at(double t) const {
  return weekly.at(week_of(t));
}

double NpiSchedule::beta_at(double t) const {
  return beta_npi(npis_at(t), effect);
}

void NpiDatasetSpec::validate() const {
  check_interval(beta_hat_range, "NpiDatasetSpec.beta_hat_range");
  if (!(horizon_days > 0.0)) {
    throw std::invalid_argument("NpiDatasetSpec: horizon_days <= 0");
  }
  if (n_points < 2) throw std::invalid_argument("NpiDatasetSpec: n_points < 2");
  if (oracle_iters < 1) {
    throw std::invalid_argument("NpiDatasetSpec: oracle_iters < 1");
  }
}

TimeSeries npi_series(const NpiSchedule& schedule, double horizon_days,
                      std::size_t n_points, const NpiDatasetSpec& spec) {
  TimeSeries s;
  s.times = linspace(0.0, horizon_days, n_points);
  std::vector<double> breaks;
  for (double b = schedule.week_days; b < horizon_days; b += schedule.week_days) {
    breaks.push_back(b);
  }
  s.states = sir_oracle([&](double t) { return schedule.beta_at(t); },
                        spec.gamma, spec.s0, spec.i0, s.times, breaks,
                        spec.oracle_iters);
  for (double t : s.times) {
    const auto& x = schedule.npis_at(t).x;
    s.exogenous.push_back({static_cast<double>(x[0]), static_cast<double>(x[1])});
  }
  return s;
}

std::vector<NpiInstance> gen_npi_dataset(const NpiDatasetSpec& spec,
                                         std::uint64_t seed) {
  spec.validate();
  std::vector<NpiInstance> out;
  out.reserve(spec.n_instances);
  const auto n_weeks =
      static_cast<std::size_t>(std::floor(spec.horizon_days / 7.0)) + 1;
  for (std::size_t k = 0; k < spec.n_instances; ++k) {
    Rng rng(mix_seed(seed, k));
    NpiInstance inst;
    const double beta_hat =
        rng.uniform(spec.beta_hat_range.first, spec.beta_hat_range.second);
    const double e1 = rng.uniform();
    const double e2 = rng.uniform();
    inst.schedule.effect = NpiEffect::make(e1, e2, beta_hat);
    for (std::size_t w = 0; w < n_weeks; ++w) {
      const int x1 = static_cast<int>(rng.below(2));
      const int x2 = static_cast<int>(rng.below(2));
      inst.schedule.weekly.push_back(NpiVector::make(x1, x2));
    }
    inst.series = npi_series(inst.schedule, spec.horizon_days, spec.n_points,
                             spec);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<double> beta_series(const NpiSchedule& schedule,
                                const std::vector<double>& times) {
  std::vector<double> b;
  b.reserve(times.size());
  for (double t : times) b.push_back(schedule.beta_at(t));
  return b;
}

// ----------------------------------------------------------- serialization

nlohmann::json to_json(const RcDatasetSpec& s) {
  return {{"kind", "rc"},
          {"n_instances", s.n_instances},
          {"v_s_range", {s.v_s_range.first, s.v_s_range.second}},
          {"tau_range", {s.tau_range.first, s.tau_range.second}},
          {"n_points", s.n_points},
          {"horizon_factor", s.horizon_factor},
          {"v0", s.v0}};
}

nlohmann::json to_json(const SirDatasetSpec& s) {
  return {{"kind", "sir"},
          {"n_instances", s.n_instances},
          {"beta_range", {s.beta_range.first, s.beta_range.second}},
          {"gamma", s.gamma},
          {"s0", s.s0},
          {"i0", s.i0},
          {"days", s.days},
          {"oracle_iters", s.oracle_iters}};
}

nlohmann::json to_json(const WalkDatasetSpec& s) {
  return {{"kind", "rc-walk"},
          {"n_instances", s.n_instances},
          {"a_range", {s.a_range.first, s.a_range.second}},
          {"n_steps", s.n_steps},
          {"grid", "n_steps + 1 points on [0, horizon_factor * tau_max]"},
          {"horizon_factor", s.horizon_factor},
          {"v_s", s.v_s},
          {"v0", s.v0},
          {"oracle_iters", s.oracle_iters}};
}

nlohmann::json to_json(const NpiDatasetSpec& s) {
  return {{"kind", "sir-npi"},
          {"n_instances", s.n_instances},
          {"beta_hat_range", {s.beta_hat_range.first, s.beta_hat_range.second}},
          {"effect_range", {0.0, 1.0}},
          {"gamma", s.gamma},
          {"s0", s.s0},
          {"i0", s.i0},
          {"horizon_days", s.horizon_days},
          {"n_points", s.n_points},
          {"oracle_iters", s.oracle_iters}};
}

namespace {

template <class Inst, class ParamsFn>
nlohmann::json dataset_json(nlohmann::json spec, std::uint64_t seed,
                            const std::vector<Inst>& data, ParamsFn params) {
  nlohmann::json j;
  j["spec"] = std::move(spec);
  j["seed"] = seed;
  auto& arr = j["instances"] = nlohmann::json::array();
  for (const auto& inst : data) {
    nlohmann::json e = series_to_json(inst.series);
    e["true_params"] = params(inst);
    arr.push_back(std::move(e));
  }
  return j;
}

}  // namespace

nlohmann::json dataset_to_json(const RcDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<RcInstance>& data) {
  return dataset_json(to_json(spec), seed, data, [](const RcInstance& i) {
    return nlohmann::json{{"tau", i.truth.tau}, {"v_s", i.truth.v_s}};
  });
}

nlohmann::json dataset_to_json(const SirDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<SirInstance>& data) {
  return dataset_json(to_json(spec), seed, data, [&](const SirInstance& i) {
    return nlohmann::json{{"beta", i.beta}, {"gamma", spec.gamma}};
  });
}

nlohmann::json dataset_to_json(const WalkDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<WalkInstance>& data) {
  return dataset_json(to_json(spec), seed, data, [](const WalkInstance& i) {
    return nlohmann::json{{"a", i.walk.a}, {"x", i.walk.x}};
  });
}

nlohmann::json dataset_to_json(const NpiDatasetSpec& spec, std::uint64_t seed,
                               const std::vector<NpiInstance>& data) {
  return dataset_json(to_json(spec), seed, data, [](const NpiInstance& i) {
    nlohmann::json weeks = nlohmann::json::array();
    for (const auto& w : i.schedule.weekly) weeks.push_back({w.x[0], w.x[1]});
    return nlohmann::json{
        {"beta_hat", i.schedule.effect.beta_hat},
        {"e", {i.schedule.effect.e[0], i.schedule.effect.e[1]}},
        {"weekly_npis", weeks},
        {"week_days", i.schedule.week_days}};
  });
}

std::uint64_t dataset_hash(const nlohmann::json& dataset) {
  const std::string text = dataset.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ude
