#ifndef UDE_APPROXIMATORS_HPP
#define UDE_APPROXIMATORS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ude/autodiff.hpp"

namespace ude {

/// Map from a raw learnable value to the parameter the dynamics see.
enum class Transform {
  identity,
  positive,  // exp(raw)
  unit,      // sigmoid(raw)
};

const char* transform_name(Transform t);
Transform transform_from_name(const std::string& name);

template <class T>
T apply_transform(Transform t, const T& raw) {
  switch (t) {
    case Transform::positive: return exp(raw);
    case Transform::unit: return sigmoid(raw);
    case Transform::identity: break;
  }
  return raw;
}

double invert_transform(Transform t, double natural);

/// Learnable constants, independent of state and time. Raw values are stored;
/// approx_eval returns the transformed (natural) values.
struct ConstApprox {
  std::vector<double> theta;
  std::vector<Transform> transforms;

  static ConstApprox from_natural(std::span<const double> natural,
                                  std::vector<Transform> transforms);
  std::vector<double> natural() const;
};

/// tau(x) = a * x, no bias.
struct LinearApprox {
  double a = 1.0;
};

/// Fully connected network, tanh hidden layers and a logistic output.
/// Parameters are stored flat, layer by layer: the weight matrix in row-major
/// (out x in) order followed by the bias vector.
struct MlpApprox {
  std::vector<std::size_t> layer_sizes;
  std::vector<double> params;

  explicit MlpApprox(std::vector<std::size_t> sizes = {5, 16, 1});

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return layer_sizes.size() - 1; }
  /// Offset of layer l's weights in `params`; biases follow the weights.
  std::size_t weight_offset(std::size_t l) const;
  static std::size_t param_count(std::span<const std::size_t> sizes);
};

using Approximator = std::variant<ConstApprox, LinearApprox, MlpApprox>;

enum class Family { constant, linear, mlp };

const char* family_name(Family f);
Family family_of(const Approximator& a);

std::size_t param_count(const Approximator& a);
std::vector<double> get_params(const Approximator& a);
void set_params(Approximator& a, std::span<const double> values);
std::size_t input_dim(const Approximator& a);
std::size_t output_dim(const Approximator& a);

namespace detail {

void check_eval_shapes(const Approximator& a, std::size_t n_theta,
                       std::size_t n_inputs, std::size_t n_out);

template <class T>
void mlp_eval(const MlpApprox& m, std::span<const T> theta,
              std::span<const T> inputs, std::span<T> out) {
  std::vector<T> cur(inputs.begin(), inputs.end());
  std::vector<T> next;
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const std::size_t n_in = m.layer_sizes[l];
    const std::size_t n_out = m.layer_sizes[l + 1];
    const std::size_t w0 = m.weight_offset(l);
    const std::size_t b0 = w0 + n_in * n_out;
    const bool last = l + 1 == m.layer_count();
    next.assign(n_out, T(0.0));
    for (std::size_t o = 0; o < n_out; ++o) {
      T z = theta[b0 + o];
      for (std::size_t k = 0; k < n_in; ++k) {
        z = z + theta[w0 + o * n_in + k] * cur[k];
      }
      next[o] = last ? sigmoid(z) : tanh(z);
    }
    cur.swap(next);
  }
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = cur[o];
}

}  // namespace detail

/// Evaluates the family at `inputs` with parameter values `theta` (which may
/// be tape leaves). ConstApprox ignores its inputs; LinearApprox takes [x];
/// MlpApprox takes layer_sizes.front() inputs.
template <class T>
void approx_eval(const Approximator& a, std::span<const T> theta,
                 std::span<const T> inputs, std::span<T> out) {
  detail::check_eval_shapes(a, theta.size(), inputs.size(), out.size());
  if (const auto* c = std::get_if<ConstApprox>(&a)) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      out[k] = apply_transform(c->transforms[k], theta[k]);
    }
  } else if (std::holds_alternative<LinearApprox>(a)) {
    out[0] = theta[0] * inputs[0];
  } else {
    detail::mlp_eval(std::get<MlpApprox>(a), theta, inputs, out);
  }
}

/// Evaluates with the approximator's own stored parameters.
std::vector<double> approx_eval(const Approximator& a,
                                std::span<const double> inputs);

/// Initialization ranges. Constant families draw natural values uniformly from
/// `const_ranges` and store them through `const_transforms`.
struct InitRanges {
  std::vector<std::pair<double, double>> const_ranges;
  std::vector<Transform> const_transforms;
  std::pair<double, double> linear_range{2.0, 6.0};
  std::vector<std::size_t> layer_sizes{5, 16, 1};
};

/// Deterministic in `seed`. MLP weights are Glorot-uniform, biases zero.
Approximator approx_init(Family family, std::uint64_t seed,
                         const InitRanges& ranges);

nlohmann::json approx_to_json(const Approximator& a);
Approximator approx_from_json(const nlohmann::json& j);

}  // namespace ude

#endif  // UDE_APPROXIMATORS_HPP
