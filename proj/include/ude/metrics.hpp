#ifndef UDE_METRICS_HPP
#define UDE_METRICS_HPP

#include <span>
#include <vector>

#include <json.hpp>

#include "ude/series.hpp"

namespace ude {

struct AggregateStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  std::size_t n = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;

  bool operator==(const AggregateStats&) const = default;
};

/// |estimate - truth| / normalizer.
double absolute_error(double estimate, double truth, double normalizer);

/// sqrt(mean over points of the squared Euclidean residual) / normalizer.
double rmse(const Trajectory<double>& pred, const TimeSeries& truth,
            double normalizer);

/// Scalar-series variant, used for reconstructed parameter series.
double rmse(std::span<const double> pred, std::span<const double> truth,
            double normalizer);

/// max - min over every component of every state of `series`.
double state_range(const TimeSeries& series);

AggregateStats aggregate(std::span<const double> values);

nlohmann::json to_json(const AggregateStats& s);

}  // namespace ude

#endif  // UDE_METRICS_HPP
