#include <cmath>
#include <span>
#include <vector>

#include <gtest/gtest.h>

#include "ude/autodiff.hpp"
#include "ude/integrate.hpp"
#include "ude/series.hpp"
#include "ude/train.hpp"

namespace {

ude::Approximator rc_const(double tau, double v_s) {
  const std::vector<double> nat{tau, v_s};
  return ude::ConstApprox::from_natural(nat, {ude::Transform::positive,
                                              ude::Transform::identity});
}

ude::Trajectory<double> sir_curve(double beta, int iters, std::size_t days) {
  const auto grid = ude::linspace(0.0, static_cast<double>(days), days + 1);
  const std::vector<double> init{0.99, 0.01, 0.0};
  const std::vector<double> nat{beta};
  return ude::rollout(ude::OdeSystem::sir(0.1),
                      ude::ConstApprox::from_natural(nat, {}), init, grid, {},
                      ude::EulerConfig{iters});
}

double rc_max_error(int iters) {
  const double tau = 3.0, v_s = 8.0;
  const auto grid = ude::linspace(0.0, 5.0 * tau, 10);
  const std::vector<double> init{0.0};
  const auto tr = ude::rollout(ude::OdeSystem::rc(), rc_const(tau, v_s), init,
                               grid, {}, ude::EulerConfig{iters});
  double err = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double exact = v_s * (1.0 - std::exp(-grid[k] / tau));
    err = std::max(err, std::abs(tr.states[k][0] - exact));
  }
  return err;
}

}  // namespace

TEST(EulerAdvance, SingleStep) {
  std::vector<double> u{0.0};
  auto f = [](std::span<const double> x, std::span<double> d) {
    d[0] = ude::rc_rhs(x[0], 1.0, 1.0);
  };
  ude::euler_advance<double>(f, std::span<double>(u), 1.0, 1);
  EXPECT_EQ(u[0], 1.0);
}

TEST(EulerAdvance, ManyStepsApproachAnalytic) {
  std::vector<double> u{0.0};
  auto f = [](std::span<const double> x, std::span<double> d) {
    d[0] = ude::rc_rhs(x[0], 1.0, 1.0);
  };
  ude::euler_advance<double>(f, std::span<double>(u), 1.0, 10000);
  EXPECT_NEAR(u[0], 1.0 - std::exp(-1.0), 1e-4);
}

TEST(EulerAdvance, DiseaseFreeStateIsFixed) {
  for (int iters : {1, 7, 1000}) {
    std::vector<double> u{0.8, 0.0, 0.2};
    auto f = [](std::span<const double> x, std::span<double> d) {
      const auto r = ude::sir_rhs(x[0], x[1], 0.35, 0.1);
      for (int c = 0; c < 3; ++c) d[c] = r[c];
    };
    ude::euler_advance<double>(f, std::span<double>(u), 3.5, iters);
    EXPECT_EQ(u, (std::vector<double>{0.8, 0.0, 0.2}));
  }
}

TEST(EulerAdvance, ArgumentErrors) {
  std::vector<double> u{0.0};
  auto f = [](std::span<const double>, std::span<double> d) { d[0] = 1.0; };
  EXPECT_THROW(ude::euler_advance<double>(f, std::span<double>(u), 0.0, 1),
               std::invalid_argument);
  EXPECT_THROW(ude::euler_advance<double>(f, std::span<double>(u), 1.0, 0),
               std::invalid_argument);
  EXPECT_THROW(ude::EulerConfig{0}.validate(), std::invalid_argument);
}

TEST(EulerAdvance, DivergenceNamesSubStep) {
  std::vector<double> u{1.0};
  auto f = [](std::span<const double> x, std::span<double> d) {
    d[0] = x[0] * x[0] * 1e200;
  };
  try {
    ude::euler_advance<double>(f, std::span<double>(u), 1.0, 10);
    FAIL() << "expected DivergenceError";
  } catch (const ude::DivergenceError& e) {
    EXPECT_EQ(e.substep(), 1);
  }
}

TEST(Rollout, ZeroDynamicsStayConstant) {
  // v_c = v_s is the RC equilibrium.
  const auto grid = ude::linspace(0.0, 4.0, 5);
  const std::vector<double> init{6.0};
  const auto tr = ude::rollout(ude::OdeSystem::rc(), rc_const(2.0, 6.0), init,
                               grid, {}, ude::EulerConfig{3});
  for (const auto& s : tr.states) EXPECT_EQ(s[0], 6.0);
  EXPECT_EQ(tr.times, grid);
}

TEST(Rollout, SirConservationAtEveryGridPoint) {
  const auto tr = sir_curve(0.3, 10000, 100);
  for (const auto& s : tr.states) {
    EXPECT_LE(std::abs(s[0] + s[1] + s[2] - 1.0), 1e-9);
  }
}

TEST(Rollout, SirConservationDriftIsTiny) {
  const auto tr = sir_curve(0.37, 10, 100);
  EXPECT_LE(std::abs(tr.states.back()[0] + tr.states.back()[1] +
                     tr.states.back()[2] - 1.0),
            1e-12);
}

TEST(Rollout, FrozenSirPeak) {
  // beta = 0.3, gamma = 0.1, S0 = 0.99, I0 = 0.01 at 10000 iterations/day.
  const auto tr = sir_curve(0.3, 10000, 100);
  std::size_t day = 0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    if (tr.states[k][1] > tr.states[day][1]) day = k;
  }
  EXPECT_EQ(day, 27u);
  EXPECT_NEAR(tr.states[day][1], 0.30362922798621222, 1e-12);
  // Closed-form peak of the SIR model: 1 - (1 + ln(R0 S0)) / R0.
  const double r0 = 3.0;
  const double peak = 1.0 - (1.0 + std::log(r0 * 0.99)) / r0;
  EXPECT_NEAR(tr.states[day][1], peak, 1e-3);
}

TEST(Rollout, FirstOrderConvergence) {
  for (int k = 1; k <= 512; k *= 2) {
    EXPECT_LE(rc_max_error(2 * k), 0.6 * rc_max_error(k)) << "k = " << k;
  }
}

TEST(Rollout, DoublingItersKeepsGrid) {
  const auto a = sir_curve(0.25, 4, 30);
  const auto b = sir_curve(0.25, 8, 30);
  EXPECT_EQ(a.times, b.times);
  EXPECT_NE(a.states, b.states);
}

TEST(Rollout, ExogenousHeldPerInterval) {
  // tau = a * x with x switching between intervals.
  const auto sys = ude::OdeSystem::rc_linear(1.0);
  const ude::Approximator lin = ude::LinearApprox{2.0};
  const std::vector<double> grid{0.0, 1.0, 2.0};
  const std::vector<std::vector<double>> x{{1.0}, {3.0}, {3.0}};
  const std::vector<double> init{0.0};
  const auto tr = ude::rollout(sys, lin, init, grid, x, ude::EulerConfig{1});
  EXPECT_DOUBLE_EQ(tr.states[1][0], 0.5);                 // 0 + (1 - 0) / 2
  EXPECT_DOUBLE_EQ(tr.states[2][0], 0.5 + 0.5 / 6.0);     // tau = 6
}

TEST(Rollout, ShapeErrors) {
  const std::vector<double> grid{0.0, 1.0};
  const std::vector<double> bad{0.0, 0.0};
  EXPECT_THROW(ude::rollout(ude::OdeSystem::rc(), rc_const(1.0, 1.0), bad, grid,
                            {}, ude::EulerConfig{}),
               ude::StructuralError);
  const std::vector<double> init{0.0};
  EXPECT_THROW(ude::rollout(ude::OdeSystem::rc_linear(1.0), ude::LinearApprox{},
                            init, grid, {}, ude::EulerConfig{}),
               ude::StructuralError);
}

TEST(Rollout, DivergenceReportsInterval) {
  // A negative time constant is rejected; a tiny one overshoots until the
  // state overflows.
  const std::vector<double> grid = ude::linspace(0.0, 50.0, 6);
  const std::vector<double> nat{-0.01, 1.0};
  const ude::Approximator a = ude::ConstApprox::from_natural(nat, {});
  const std::vector<double> init{0.0};
  EXPECT_THROW(ude::rollout(ude::OdeSystem::rc(), a, init, grid, {},
                            ude::EulerConfig{1}),
               ude::ParameterDomainError);
  ude::Approximator lin = ude::LinearApprox{1e-100};
  const std::vector<std::vector<double>> x(6, std::vector<double>{1.0});
  try {
    ude::rollout(ude::OdeSystem::rc_linear(1.0), lin, init, grid, x,
                 ude::EulerConfig{1});
    FAIL() << "expected DivergenceError";
  } catch (const ude::DivergenceError& e) {
    EXPECT_EQ(e.grid_index(), 3);
  }
}

TEST(RolloutGradient, MatchesFiniteDifferences) {
  const std::vector<double> grid = ude::linspace(0.0, 15.0, 10);
  ude::TimeSeries data;
  data.times = grid;
  for (double t : grid) data.states.push_back({7.5 * (1.0 - std::exp(-t / 3.0))});
  for (int iters : {1, 10}) {
    const ude::EulerConfig cfg{iters};
    const ude::Approximator init = rc_const(4.0, 6.0);
    const auto theta = ude::get_params(init);
    std::vector<double> g;
    ude::trajectory_cost_gradient(ude::OdeSystem::rc(), init, theta, data, cfg, g);
    const auto fd = ude::finite_diff_gradient(
        [&](std::span<const double> p) {
          return ude::trajectory_cost(ude::OdeSystem::rc(), init, p, data, cfg);
        },
        ude::ParamVector(theta), 1e-6);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(std::abs(g[i] - fd[i]) / std::max(std::abs(fd[i]), 1e-8), 1e-4);
    }
  }
}
