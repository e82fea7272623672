#ifndef UDE_AUTODIFF_HPP
#define UDE_AUTODIFF_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ude {

/// Raised when a recorded value is NaN or infinite.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(std::size_t position, const std::string& what)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Raised when shapes or tape/parameter pairings do not line up.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Ordered, optionally labelled, list of finite reals.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> values,
                       std::vector<std::string> names = {});

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }

  void set(std::size_t i, double v);
  void assign(std::span<const double> values);

 private:
  void validate() const;

  std::vector<double> values_;
  std::vector<std::string> names_;
};

enum class OpKind : std::uint8_t {
  leaf,
  constant,
  add,
  sub,
  mul,
  div,
  neg,
  exp,
  tanh,
  pow_const,
};

const char* op_name(OpKind kind);

/// One elementary operation on the tape. Unused parent slots hold -1.
struct TapeNode {
  OpKind kind = OpKind::constant;
  std::int32_t parents[2] = {-1, -1};
  double partials[2] = {0.0, 0.0};
  double value = 0.0;
};

class Tape;

/// A scalar that records the operations applied to it. A Var without a tape
/// is a plain constant and records nothing.
class Var {
 public:
  Var() = default;
  Var(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  double value() const { return value_; }
  Tape* tape() const { return tape_; }
  std::int32_t index() const { return index_; }
  bool is_constant() const { return tape_ == nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::int32_t index, double value)
      : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
  double value_ = 0.0;
};

/// Linear record of a scalar computation in topological order.
///
/// Leaves must be created before any other node so that leaf i sits at tape
/// position i. Memory is retained across clear() so that a training loop can
/// re-record every step without reallocating.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  void clear();
  void reserve(std::size_t n) { nodes_.reserve(n); }

  Var leaf(double value);
  std::vector<Var> leaves(std::span<const double> values);

  std::size_t size() const { return nodes_.size(); }
  std::size_t leaf_count() const { return leaf_count_; }
  const TapeNode& node(std::size_t i) const { return nodes_[i]; }
  std::span<const TapeNode> nodes() const { return nodes_; }

  /// Index of the first non-finite value on the tape, or size() if none.
  std::size_t first_non_finite() const;

  /// Reverse sweep from `output`; returns d(output)/d(leaf i) for every leaf.
  std::vector<double> gradient(const Var& output) const;
  std::vector<double> gradient_at(std::size_t output_index) const;

  // Recording primitives used by the operator overloads.
  Var unary(OpKind kind, const Var& a, double value, double da);
  Var binary(OpKind kind, const Var& a, const Var& b, double value, double da,
             double db);

 private:
  Var push(TapeNode node);

  std::vector<TapeNode> nodes_;
  std::size_t leaf_count_ = 0;
  mutable std::vector<double> adjoint_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var exp(const Var& a);
Var tanh(const Var& a);
Var pow_int(const Var& a, int n);

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

// Scalar helpers spelled identically for double and Var so that model code can
// be written once as a template.
inline double exp(double x) { return std::exp(x); }
inline double tanh(double x) { return std::tanh(x); }
double pow_int(double x, int n);

template <class T>
T sigmoid(const T& x) {
  return T(1.0) / (T(1.0) + exp(-x));
}

/// Value of a taped expression together with its tape. `output` is the tape
/// position of the result, or -1 when the expression did not touch a leaf.
struct TapeResult {
  double value = 0.0;
  Tape tape;
  std::int64_t output = -1;
};

using TapedExpr = std::function<Var(std::span<const Var>)>;
using PlainExpr = std::function<double(std::span<const double>)>;

/// Records `expr` at `params`. Throws NonFiniteError naming the first tape
/// position whose value is not finite.
TapeResult tape_eval(const TapedExpr& expr, const ParamVector& params);

/// Reverse accumulation of `result` with respect to `wrt`. The tape's leaves
/// must match `wrt` in count and value.
std::vector<double> grad(const TapeResult& result, const ParamVector& wrt);

/// Central differences (f(p + h e_i) - f(p - h e_i)) / 2h per coordinate.
std::vector<double> finite_diff_gradient(const PlainExpr& expr,
                                         const ParamVector& params,
                                         double step);

}  // namespace ude

#endif  // UDE_AUTODIFF_HPP
