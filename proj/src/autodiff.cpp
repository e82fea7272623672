#include "ude/autodiff.hpp"

#include <algorithm>
#include <sstream>

namespace ude {

ParamVector::ParamVector(std::vector<double> values,
                         std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  validate();
}

void ParamVector::validate() const {
  if (values_.empty()) {
    throw std::invalid_argument("ParamVector: at least one value required");
  }
  if (!names_.empty() && names_.size() != values_.size()) {
    throw StructuralError("ParamVector: names and values differ in length");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream msg;
      msg << "ParamVector: value " << i << " is not finite";
      throw NonFiniteError(i, msg.str());
    }
  }
}

void ParamVector::set(std::size_t i, double v) {
  if (!std::isfinite(v)) {
    throw NonFiniteError(i, "ParamVector: assigned value is not finite");
  }
  values_.at(i) = v;
}

void ParamVector::assign(std::span<const double> values) {
  if (values.size() != values_.size()) {
    throw StructuralError("ParamVector: assign with wrong length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) set(i, values[i]);
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::leaf: return "leaf";
    case OpKind::constant: return "const";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::neg: return "neg";
    case OpKind::exp: return "exp";
    case OpKind::tanh: return "tanh";
    case OpKind::pow_const: return "pow-const";
  }
  return "?";
}

void Tape::clear() {
  nodes_.clear();
  leaf_count_ = 0;
}

Var Tape::push(TapeNode node) {
  const auto idx = static_cast<std::int32_t>(nodes_.size());
  const double v = node.value;
  nodes_.push_back(node);
  return Var(this, idx, v);
}

Var Tape::leaf(double value) {
  if (leaf_count_ != nodes_.size()) {
    throw StructuralError("Tape: leaves must precede all other nodes");
  }
  TapeNode n;
  n.kind = OpKind::leaf;
  n.value = value;
  ++leaf_count_;
  return push(n);
}

std::vector<Var> Tape::leaves(std::span<const double> values) {
  std::vector<Var> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(leaf(v));
  return out;
}

std::size_t Tape::first_non_finite() const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i].value)) return i;
  }
  return nodes_.size();
}

Var Tape::unary(OpKind kind, const Var& a, double value, double da) {
  TapeNode n;
  n.kind = kind;
  n.parents[0] = a.index();
  n.partials[0] = da;
  n.value = value;
  return push(n);
}

Var Tape::binary(OpKind kind, const Var& a, const Var& b, double value,
                 double da, double db) {
  TapeNode n;
  n.kind = kind;
  n.parents[0] = a.index();
  n.parents[1] = b.index();
  n.partials[0] = da;
  n.partials[1] = db;
  n.value = value;
  return push(n);
}

std::vector<double> Tape::gradient(const Var& output) const {
  if (output.is_constant()) return std::vector<double>(leaf_count_, 0.0);
  if (output.tape() != this) {
    throw StructuralError("Tape::gradient: output recorded on another tape");
  }
  return gradient_at(static_cast<std::size_t>(output.index()));
}

std::vector<double> Tape::gradient_at(std::size_t out) const {
  if (out >= nodes_.size()) {
    throw StructuralError("Tape::gradient: output index past end of tape");
  }
  std::vector<double> g(leaf_count_, 0.0);
  adjoint_.assign(out + 1, 0.0);
  adjoint_[out] = 1.0;
  for (std::size_t k = out + 1; k-- > leaf_count_;) {
    const double adj = adjoint_[k];
    if (adj == 0.0) continue;
    const TapeNode& n = nodes_[k];
    if (n.parents[0] >= 0) adjoint_[n.parents[0]] += adj * n.partials[0];
    if (n.parents[1] >= 0) adjoint_[n.parents[1]] += adj * n.partials[1];
  }
  std::copy_n(adjoint_.begin(), std::min(leaf_count_, out + 1), g.begin());
  return g;
}

namespace {

Tape* common_tape(const Var& a, const Var& b) {
  if (a.tape() && b.tape() && a.tape() != b.tape()) {
    throw StructuralError("Var: operands recorded on different tapes");
  }
  return a.tape() ? a.tape() : b.tape();
}

// Records a binary op, collapsing to a one-parent node when an operand is a
// constant so that constants never occupy tape slots.
Var record(OpKind kind, const Var& a, const Var& b, double value, double da,
           double db) {
  Tape* t = common_tape(a, b);
  if (!t) return Var(value);
  if (a.is_constant()) return t->unary(kind, b, value, db);
  if (b.is_constant()) return t->unary(kind, a, value, da);
  return t->binary(kind, a, b, value, da, db);
}

}  // namespace

Var operator+(const Var& a, const Var& b) {
  return record(OpKind::add, a, b, a.value() + b.value(), 1.0, 1.0);
}

Var operator-(const Var& a, const Var& b) {
  return record(OpKind::sub, a, b, a.value() - b.value(), 1.0, -1.0);
}

Var operator*(const Var& a, const Var& b) {
  return record(OpKind::mul, a, b, a.value() * b.value(), b.value(),
                a.value());
}

Var operator/(const Var& a, const Var& b) {
  const double q = a.value() / b.value();
  return record(OpKind::div, a, b, q, 1.0 / b.value(), -q / b.value());
}

Var operator-(const Var& a) {
  if (a.is_constant()) return Var(-a.value());
  return a.tape()->unary(OpKind::neg, a, -a.value(), -1.0);
}

Var exp(const Var& a) {
  const double e = std::exp(a.value());
  if (a.is_constant()) return Var(e);
  return a.tape()->unary(OpKind::exp, a, e, e);
}

Var tanh(const Var& a) {
  const double t = std::tanh(a.value());
  if (a.is_constant()) return Var(t);
  return a.tape()->unary(OpKind::tanh, a, t, 1.0 - t * t);
}

double pow_int(double x, int n) {
  if (n < 0) return 1.0 / pow_int(x, -n);
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

Var pow_int(const Var& a, int n) {
  const double v = pow_int(a.value(), n);
  if (a.is_constant()) return Var(v);
  const double d = n == 0 ? 0.0 : n * pow_int(a.value(), n - 1);
  return a.tape()->unary(OpKind::pow_const, a, v, d);
}

TapeResult tape_eval(const TapedExpr& expr, const ParamVector& params) {
  TapeResult r;
  const auto leaves = r.tape.leaves(params.values());
  const Var out = expr(leaves);
  if (!out.is_constant()) {
    if (out.tape() != &r.tape) {
      throw StructuralError("tape_eval: output recorded on another tape");
    }
    r.output = out.index();
  }
  r.value = out.value();
  const std::size_t bad = r.tape.first_non_finite();
  if (bad != r.tape.size()) {
    std::ostringstream msg;
    msg << "tape_eval: non-finite value at tape position " << bad << " ("
        << op_name(r.tape.node(bad).kind) << ")";
    throw NonFiniteError(bad, msg.str());
  }
  if (!std::isfinite(r.value)) {
    throw NonFiniteError(r.tape.size(), "tape_eval: non-finite output");
  }
  return r;
}

std::vector<double> grad(const TapeResult& result, const ParamVector& wrt) {
  const Tape& tape = result.tape;
  if (tape.leaf_count() != wrt.size()) {
    throw StructuralError("grad: tape leaf count differs from parameter count");
  }
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    if (tape.node(i).value != wrt[i]) {
      throw StructuralError("grad: tape was recorded at different parameters");
    }
  }
  if (result.output < 0) return std::vector<double>(wrt.size(), 0.0);
  return tape.gradient_at(static_cast<std::size_t>(result.output));
}

std::vector<double> finite_diff_gradient(const PlainExpr& expr,
                                         const ParamVector& params,
                                         double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite_diff_gradient: step must be positive");
  }
  std::vector<double> p(params.values().begin(), params.values().end());
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + step;
    const double up = expr(p);
    p[i] = orig - step;
    const double down = expr(p);
    p[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      std::ostringstream msg;
      msg << "finite_diff_gradient: non-finite evaluation perturbing "
          << "coordinate " << i;
      throw NonFiniteError(i, msg.str());
    }
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

}  // namespace ude
