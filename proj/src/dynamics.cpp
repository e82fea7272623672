#include "ude/dynamics.hpp"

#include <cmath>

namespace ude {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

RcParams RcParams::make(double tau, double v_s) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ParameterDomainError("RcParams: tau must be positive and finite");
  }
  if (!std::isfinite(v_s)) {
    throw ParameterDomainError("RcParams: v_s must be finite");
  }
  return {tau, v_s};
}

SirState SirState::make(double s, double i, double r) {
  if (!(s >= 0.0 && i >= 0.0 && r >= 0.0)) {
    throw StateDomainError("SirState: fractions must be nonnegative");
  }
  if (std::abs(s + i + r - 1.0) > 1e-9) {
    throw StateDomainError("SirState: fractions must sum to 1");
  }
  return {s, i, r};
}

SirParams SirParams::make(double beta, double gamma) {
  if (!in_unit(beta) || !in_unit(gamma)) {
    throw ParameterDomainError("SirParams: beta and gamma must lie in [0, 1]");
  }
  return {beta, gamma};
}

NpiVector NpiVector::make(int x1, int x2) {
  if ((x1 != 0 && x1 != 1) || (x2 != 0 && x2 != 1)) {
    throw ParameterDomainError("NpiVector: entries must be 0 or 1");
  }
  return {{x1, x2}};
}

NpiEffect NpiEffect::make(double e1, double e2, double beta_hat) {
  if (!in_unit(e1) || !in_unit(e2) || !in_unit(beta_hat)) {
    throw ParameterDomainError("NpiEffect: entries must lie in [0, 1]");
  }
  return {{e1, e2}, beta_hat};
}

double rc_rhs(const RcState& state, const RcParams& params) {
  return rc_rhs(state.v_c, params.tau, params.v_s);
}

std::array<double, 3> sir_rhs(const SirState& state, const SirParams& params) {
  return sir_rhs(state.s, state.i, params.beta, params.gamma);
}

double beta_npi(const NpiVector& npis, const NpiEffect& effect) {
  return effect.beta_hat * pow_int(effect.e[0], npis.x[0]) *
         pow_int(effect.e[1], npis.x[1]);
}

}  // namespace ude
