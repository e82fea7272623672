#ifndef UDE_SERIES_HPP
#define UDE_SERIES_HPP

#include <vector>

#include <json.hpp>

namespace ude {

/// Measured (time, state) pairs. `exogenous`, when present, holds one input
/// vector per grid point; entry i drives the interval [t_i, t_{i+1}).
struct TimeSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> exogenous;

  std::size_t size() const { return times.size(); }
  std::size_t state_dim() const { return states.empty() ? 0 : states[0].size(); }
  bool has_exogenous() const { return !exogenous.empty(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }

  /// Throws unless times are strictly increasing and all arrays line up.
  void validate() const;
};

/// Model prediction over a grid. T is double or a taped scalar.
template <class T>
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<T>> states;

  std::size_t size() const { return times.size(); }
};

nlohmann::json series_to_json(const TimeSeries& s);
TimeSeries series_from_json(const nlohmann::json& j);

/// `n` points equally spaced on [t0, t1], endpoints exact.
std::vector<double> linspace(double t0, double t1, std::size_t n);

}  // namespace ude

#endif  // UDE_SERIES_HPP
