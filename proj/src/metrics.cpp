#include "ude/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ude/autodiff.hpp"

namespace ude {

namespace {

void check_normalizer(double normalizer) {
  if (!(normalizer > 0.0)) {
    throw std::invalid_argument("metrics: normalizer must be positive");
  }
}

}  // namespace

double absolute_error(double estimate, double truth, double normalizer) {
  check_normalizer(normalizer);
  return std::abs(estimate - truth) / normalizer;
}

double rmse(const Trajectory<double>& pred, const TimeSeries& truth,
            double normalizer) {
  check_normalizer(normalizer);
  if (pred.size() != truth.size() || pred.times != truth.times) {
    throw StructuralError("rmse: prediction and truth grids differ");
  }
  if (pred.size() == 0) throw StructuralError("rmse: empty series");
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (pred.states[k].size() != truth.states[k].size()) {
      throw StructuralError("rmse: state dimension mismatch");
    }
    for (std::size_t c = 0; c < pred.states[k].size(); ++c) {
      const double r = pred.states[k][c] - truth.states[k][c];
      sum += r * r;
    }
  }
  return std::sqrt(sum / static_cast<double>(pred.size())) / normalizer;
}

double rmse(std::span<const double> pred, std::span<const double> truth,
            double normalizer) {
  check_normalizer(normalizer);
  if (pred.size() != truth.size() || pred.empty()) {
    throw StructuralError("rmse: series lengths differ");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double r = pred[k] - truth[k];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(pred.size())) / normalizer;
}

double state_range(const TimeSeries& series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series.states) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return hi - lo;
}

AggregateStats aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: empty list");
  AggregateStats s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  // Guard the ordering invariant against rounding in the mean.
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (s.min == s.max) s.std = 0.0;
  return s;
}

nlohmann::json to_json(const AggregateStats& s) {
  return {{"mean", s.mean}, {"std", s.std},       {"n", s.n},
          {"min", s.min},   {"median", s.median}, {"max", s.max}};
}

}  // namespace ude
