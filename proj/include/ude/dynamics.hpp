#ifndef UDE_DYNAMICS_HPP
#define UDE_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <stdexcept>

#include "ude/autodiff.hpp"

namespace ude {

class ParameterDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class StateDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct RcState {
  double v_c = 0.0;
};

/// Time constant (seconds, > 0) and source voltage of a charging RC circuit.
struct RcParams {
  double tau = 1.0;
  double v_s = 1.0;

  static RcParams make(double tau, double v_s);
};

/// Population fractions with N normalized to 1.
struct SirState {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;

  static SirState make(double s, double i, double r);
};

struct SirParams {
  double beta = 0.0;
  double gamma = 0.0;

  static SirParams make(double beta, double gamma);
};

/// Which of the two interventions are active during a week.
struct NpiVector {
  std::array<int, 2> x{0, 0};

  static NpiVector make(int x1, int x2);
};

/// Per-intervention multiplicative effect and the inherent infection rate.
struct NpiEffect {
  std::array<double, 2> e{1.0, 1.0};
  double beta_hat = 0.0;

  static NpiEffect make(double e1, double e2, double beta_hat);
};

/// dv_c/dt = (v_s - v_c) / tau. Checks that tau is positive and finite on the
/// value of the operand.
template <class T>
T rc_rhs(const T& v_c, const T& tau, const T& v_s) {
  if (!(value_of(tau) > 0.0) || !std::isfinite(value_of(tau))) {
    throw ParameterDomainError("rc_rhs: tau must be positive and finite");
  }
  return (v_s - v_c) / tau;
}

double rc_rhs(const RcState& state, const RcParams& params);

/// SIR derivatives with N = 1. The infection flow beta*s*i is formed once and
/// dr is taken as -(ds + di), which equals gamma*i up to rounding and makes
/// ds + di + dr (summed in that order) exactly zero.
template <class T>
std::array<T, 3> sir_rhs(const T& s, const T& i, const T& beta,
                         const T& gamma) {
  const T infection = beta * s * i;
  const T ds = -infection;
  const T di = infection - gamma * i;
  return {ds, di, -(ds + di)};
}

std::array<double, 3> sir_rhs(const SirState& state, const SirParams& params);

/// beta_hat * e1^x1 * e2^x2.
double beta_npi(const NpiVector& npis, const NpiEffect& effect);

}  // namespace ude

#endif  // UDE_DYNAMICS_HPP
