#include "ude/approximators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ude/random.hpp"

namespace ude {

const char* transform_name(Transform t) {
  switch (t) {
    case Transform::identity: return "identity";
    case Transform::positive: return "positive";
    case Transform::unit: return "unit";
  }
  return "?";
}

Transform transform_from_name(const std::string& name) {
  if (name == "identity") return Transform::identity;
  if (name == "positive") return Transform::positive;
  if (name == "unit") return Transform::unit;
  throw std::invalid_argument("unknown transform '" + name + "'");
}

double invert_transform(Transform t, double natural) {
  switch (t) {
    case Transform::positive:
      if (!(natural > 0.0)) {
        throw std::domain_error("positive transform needs a positive value");
      }
      return std::log(natural);
    case Transform::unit:
      if (!(natural > 0.0 && natural < 1.0)) {
        throw std::domain_error("unit transform needs a value in (0, 1)");
      }
      return std::log(natural / (1.0 - natural));
    case Transform::identity: break;
  }
  return natural;
}

ConstApprox ConstApprox::from_natural(std::span<const double> natural,
                                      std::vector<Transform> transforms) {
  if (transforms.empty()) transforms.assign(natural.size(), Transform::identity);
  if (transforms.size() != natural.size()) {
    throw StructuralError("ConstApprox: one transform per value required");
  }
  ConstApprox c;
  c.transforms = std::move(transforms);
  for (std::size_t k = 0; k < natural.size(); ++k) {
    c.theta.push_back(invert_transform(c.transforms[k], natural[k]));
  }
  return c;
}

std::vector<double> ConstApprox::natural() const {
  std::vector<double> out(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    out[k] = apply_transform(transforms[k], theta[k]);
  }
  return out;
}

MlpApprox::MlpApprox(std::vector<std::size_t> sizes)
    : layer_sizes(std::move(sizes)) {
  if (layer_sizes.size() < 2) {
    throw StructuralError("MlpApprox: need at least input and output sizes");
  }
  for (auto n : layer_sizes) {
    if (n == 0) throw StructuralError("MlpApprox: empty layer");
  }
  params.assign(param_count(layer_sizes), 0.0);
}

std::size_t MlpApprox::param_count(std::span<const std::size_t> sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    n += sizes[l] * sizes[l + 1] + sizes[l + 1];
  }
  return n;
}

std::size_t MlpApprox::weight_offset(std::size_t l) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < l; ++k) {
    off += layer_sizes[k] * layer_sizes[k + 1] + layer_sizes[k + 1];
  }
  return off;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::constant: return "constant";
    case Family::linear: return "linear";
    case Family::mlp: return "mlp";
  }
  return "?";
}

Family family_of(const Approximator& a) {
  return static_cast<Family>(a.index());
}

std::size_t param_count(const Approximator& a) {
  if (const auto* c = std::get_if<ConstApprox>(&a)) return c->theta.size();
  if (std::holds_alternative<LinearApprox>(a)) return 1;
  return std::get<MlpApprox>(a).params.size();
}

std::vector<double> get_params(const Approximator& a) {
  if (const auto* c = std::get_if<ConstApprox>(&a)) return c->theta;
  if (const auto* l = std::get_if<LinearApprox>(&a)) return {l->a};
  return std::get<MlpApprox>(a).params;
}

void set_params(Approximator& a, std::span<const double> values) {
  if (values.size() != param_count(a)) {
    throw StructuralError("set_params: wrong parameter count");
  }
  if (auto* c = std::get_if<ConstApprox>(&a)) {
    c->theta.assign(values.begin(), values.end());
  } else if (auto* l = std::get_if<LinearApprox>(&a)) {
    l->a = values[0];
  } else {
    auto& m = std::get<MlpApprox>(a);
    m.params.assign(values.begin(), values.end());
  }
}

std::size_t input_dim(const Approximator& a) {
  if (std::holds_alternative<ConstApprox>(a)) return 0;
  if (std::holds_alternative<LinearApprox>(a)) return 1;
  return std::get<MlpApprox>(a).input_dim();
}

std::size_t output_dim(const Approximator& a) {
  if (const auto* c = std::get_if<ConstApprox>(&a)) return c->theta.size();
  if (std::holds_alternative<LinearApprox>(a)) return 1;
  return std::get<MlpApprox>(a).output_dim();
}

namespace detail {

void check_eval_shapes(const Approximator& a, std::size_t n_theta,
                       std::size_t n_inputs, std::size_t n_out) {
  if (n_theta != param_count(a)) {
    throw StructuralError("approx_eval: parameter count mismatch");
  }
  // Constants accept (and ignore) any input vector.
  if (!std::holds_alternative<ConstApprox>(a) && n_inputs != input_dim(a)) {
    std::ostringstream msg;
    msg << "approx_eval: " << family_name(family_of(a)) << " expects "
        << input_dim(a) << " inputs, got " << n_inputs;
    throw StructuralError(msg.str());
  }
  if (n_out != output_dim(a)) {
    throw StructuralError("approx_eval: output size mismatch");
  }
}

}  // namespace detail

std::vector<double> approx_eval(const Approximator& a,
                                std::span<const double> inputs) {
  const auto theta = get_params(a);
  std::vector<double> out(output_dim(a));
  approx_eval<double>(a, theta, inputs, out);
  return out;
}

Approximator approx_init(Family family, std::uint64_t seed,
                         const InitRanges& ranges) {
  Rng rng(seed);
  switch (family) {
    case Family::constant: {
      std::vector<double> natural;
      for (const auto& [lo, hi] : ranges.const_ranges) {
        natural.push_back(rng.uniform(lo, hi));
      }
      return ConstApprox::from_natural(natural, ranges.const_transforms);
    }
    case Family::linear:
      return LinearApprox{
          rng.uniform(ranges.linear_range.first, ranges.linear_range.second)};
    case Family::mlp: {
      MlpApprox m(ranges.layer_sizes);
      for (std::size_t l = 0; l < m.layer_count(); ++l) {
        const std::size_t n_in = m.layer_sizes[l];
        const std::size_t n_out = m.layer_sizes[l + 1];
        const double r = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
        const std::size_t w0 = m.weight_offset(l);
        for (std::size_t k = 0; k < n_in * n_out; ++k) {
          m.params[w0 + k] = rng.uniform(-r, r);
        }
      }
      return m;
    }
  }
  throw std::invalid_argument("approx_init: unknown family");
}

nlohmann::json approx_to_json(const Approximator& a) {
  nlohmann::json j;
  j["family"] = family_name(family_of(a));
  j["params"] = get_params(a);
  if (const auto* c = std::get_if<ConstApprox>(&a)) {
    std::vector<std::string> names;
    for (auto t : c->transforms) names.emplace_back(transform_name(t));
    j["transforms"] = names;
    j["natural"] = c->natural();
  } else if (const auto* m = std::get_if<MlpApprox>(&a)) {
    j["layer_sizes"] = m->layer_sizes;
    j["hidden_activation"] = "tanh";
    j["output_activation"] = "sigmoid";
  }
  return j;
}

Approximator approx_from_json(const nlohmann::json& j) {
  const auto family = j.at("family").get<std::string>();
  const auto params = j.at("params").get<std::vector<double>>();
  Approximator a;
  if (family == "constant") {
    ConstApprox c;
    for (const auto& name : j.at("transforms")) {
      c.transforms.push_back(transform_from_name(name.get<std::string>()));
    }
    c.theta.assign(c.transforms.size(), 0.0);
    a = c;
  } else if (family == "linear") {
    a = LinearApprox{};
  } else if (family == "mlp") {
    a = MlpApprox(j.at("layer_sizes").get<std::vector<std::size_t>>());
  } else {
    throw std::invalid_argument("unknown approximator family '" + family + "'");
  }
  set_params(a, params);
  return a;
}

}  // namespace ude
