#include "ude/series.hpp"

#include <stdexcept>

#include "ude/autodiff.hpp"

namespace ude {

void TimeSeries::validate() const {
  if (states.size() != times.size()) {
    throw StructuralError("TimeSeries: times and states differ in length");
  }
  if (!exogenous.empty() && exogenous.size() != times.size()) {
    throw StructuralError("TimeSeries: exogenous inputs not aligned to grid");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw std::invalid_argument("TimeSeries: times must strictly increase");
    }
    if (states[k].size() != states[0].size()) {
      throw StructuralError("TimeSeries: ragged state vectors");
    }
  }
}

nlohmann::json series_to_json(const TimeSeries& s) {
  nlohmann::json j;
  j["times"] = s.times;
  j["states"] = s.states;
  j["exogenous"] = s.exogenous;
  return j;
}

TimeSeries series_from_json(const nlohmann::json& j) {
  TimeSeries s;
  s.times = j.at("times").get<std::vector<double>>();
  s.states = j.at("states").get<std::vector<std::vector<double>>>();
  if (j.contains("exogenous")) {
    s.exogenous = j.at("exogenous").get<std::vector<std::vector<double>>>();
  }
  s.validate();
  return s;
}

std::vector<double> linspace(double t0, double t1, std::size_t n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> t(n);
  const double span = t1 - t0;
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = t0 + span * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  t.back() = t1;
  return t;
}

}  // namespace ude
