#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ude/autodiff.hpp"
#include "ude/dynamics.hpp"

TEST(RcRhs, Examples) {
  EXPECT_EQ(ude::rc_rhs(0.0, 1.0, 1.0), 1.0);
  EXPECT_EQ(ude::rc_rhs(3.7, 0.4, 3.7), 0.0);
  EXPECT_EQ(ude::rc_rhs(ude::RcState{2.0}, ude::RcParams::make(4.0, 10.0)), 2.0);
}

TEST(RcRhs, NonPositiveOrInfiniteTauIsRejected) {
  EXPECT_THROW(ude::rc_rhs(0.0, 0.0, 1.0), ude::ParameterDomainError);
  EXPECT_THROW(ude::rc_rhs(0.0, HUGE_VAL, 1.0), ude::ParameterDomainError);
  EXPECT_THROW(ude::RcParams::make(-1.0, 5.0), ude::ParameterDomainError);
}

TEST(RcRhs, SignFollowsSourceMinusCapacitor) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> v(-10.0, 10.0), tau(0.01, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double vc = v(rng), vs = v(rng);
    const double d = ude::rc_rhs(vc, tau(rng), vs);
    EXPECT_EQ(d > 0, vs > vc);
    EXPECT_EQ(d < 0, vs < vc);
  }
}

TEST(SirRhs, Examples) {
  const auto frozen = ude::sir_rhs(ude::SirState::make(0.7, 0.2, 0.1),
                                   ude::SirParams::make(0.0, 0.0));
  for (double d : frozen) EXPECT_EQ(d, 0.0);

  const auto d = ude::sir_rhs(ude::SirState::make(0.99, 0.01, 0.0),
                              ude::SirParams::make(0.3, 0.1));
  EXPECT_NEAR(d[0], -0.00297, 1e-15);
  EXPECT_NEAR(d[1], 0.00197, 1e-15);
  EXPECT_NEAR(d[2], 0.001, 1e-15);

  const auto free = ude::sir_rhs(ude::SirState::make(0.6, 0.0, 0.4),
                                 ude::SirParams::make(0.35, 0.1));
  for (double x : free) EXPECT_EQ(x, 0.0);
}

TEST(SirRhs, ComponentsSumToExactlyZero) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const double s = u(rng), i = (1.0 - s) * u(rng);
    const auto d = ude::sir_rhs(s, i, u(rng), u(rng));
    EXPECT_EQ(d[0] + d[1] + d[2], 0.0);
  }
}

TEST(SirState, Validation) {
  EXPECT_NO_THROW(ude::SirState::make(0.99, 0.01, 0.0));
  EXPECT_THROW(ude::SirState::make(0.5, 0.4, 0.0), ude::StateDomainError);
  EXPECT_THROW(ude::SirState::make(1.1, -0.1, 0.0), ude::StateDomainError);
  EXPECT_THROW(ude::SirParams::make(1.5, 0.1), ude::ParameterDomainError);
  EXPECT_THROW(ude::SirParams::make(0.3, -0.1), ude::ParameterDomainError);
}

TEST(BetaNpi, Examples) {
  const auto none = ude::NpiVector::make(0, 0);
  EXPECT_EQ(ude::beta_npi(none, ude::NpiEffect::make(0.1, 0.9, 0.3)), 0.3);
  EXPECT_NEAR(ude::beta_npi(ude::NpiVector::make(1, 1),
                            ude::NpiEffect::make(0.5, 0.5, 0.3)),
              0.075, 1e-15);
  EXPECT_NEAR(ude::beta_npi(ude::NpiVector::make(1, 0),
                            ude::NpiEffect::make(0.8, 0.3, 0.25)),
              0.2, 1e-15);
}

TEST(BetaNpi, Validation) {
  EXPECT_THROW(ude::NpiVector::make(2, 0), ude::ParameterDomainError);
  EXPECT_THROW(ude::NpiEffect::make(1.2, 0.5, 0.3), ude::ParameterDomainError);
}

TEST(BetaNpi, ActivatingAnInterventionNeverRaisesBeta) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const auto e = ude::NpiEffect::make(u(rng), u(rng), u(rng));
    for (int other = 0; other < 2; ++other) {
      EXPECT_LE(ude::beta_npi(ude::NpiVector::make(1, other), e),
                ude::beta_npi(ude::NpiVector::make(0, other), e));
      EXPECT_LE(ude::beta_npi(ude::NpiVector::make(other, 1), e),
                ude::beta_npi(ude::NpiVector::make(other, 0), e));
    }
  }
}

TEST(RhsGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
  };
  for (int k = 0; k < 50; ++k) {
    const ude::ParamVector rc({u(rng) * 10.0, 0.5 + 5.0 * u(rng), 10.0 * u(rng)});
    const auto g = ude::grad(
        ude::tape_eval([](auto x) { return ude::rc_rhs(x[0], x[1], x[2]); }, rc),
        rc);
    const auto fd = ude::finite_diff_gradient(
        [](auto x) { return ude::rc_rhs(x[0], x[1], x[2]); }, rc, 1e-6);
    for (int i = 0; i < 3; ++i) EXPECT_LE(rel(g[i], fd[i]), 1e-5);

    const ude::ParamVector sir({u(rng), u(rng) * 0.3, u(rng), u(rng) * 0.3});
    for (int c = 0; c < 3; ++c) {
      const auto gs = ude::grad(
          ude::tape_eval(
              [c](auto x) { return ude::sir_rhs(x[0], x[1], x[2], x[3])[c]; }, sir),
          sir);
      const auto fds = ude::finite_diff_gradient(
          [c](auto x) { return ude::sir_rhs(x[0], x[1], x[2], x[3])[c]; }, sir,
          1e-6);
      for (int i = 0; i < 4; ++i) EXPECT_LE(rel(gs[i], fds[i]), 1e-5);
    }
  }
}
