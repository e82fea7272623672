#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ude/approximators.hpp"
#include "ude/autodiff.hpp"

namespace {

std::vector<double> eval(const ude::Approximator& a, std::vector<double> in) {
  return ude::approx_eval(a, in);
}

ude::InitRanges rc_ranges() {
  ude::InitRanges r;
  r.const_ranges = {{2.0, 6.0}, {5.0, 10.0}};
  r.const_transforms = {ude::Transform::positive, ude::Transform::identity};
  return r;
}

}  // namespace

TEST(ConstApprox, IgnoresInputs) {
  const std::vector<double> nat{2.5, 7.0};
  const ude::Approximator a = ude::ConstApprox::from_natural(nat, {});
  EXPECT_EQ(eval(a, {}), nat);
  EXPECT_EQ(eval(a, {1.0, -3.0, 8.0}), nat);
}

TEST(ConstApprox, TransformsRoundTrip) {
  const std::vector<double> nat{2.5, 7.0, 0.3};
  const auto c = ude::ConstApprox::from_natural(
      nat, {ude::Transform::positive, ude::Transform::identity,
            ude::Transform::unit});
  const auto back = c.natural();
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(back[k], nat[k], 1e-14);
  EXPECT_EQ(c.theta[1], 7.0);
  EXPECT_NEAR(c.theta[0], std::log(2.5), 1e-15);
}

TEST(ConstApprox, TransformDomainErrors) {
  EXPECT_THROW(ude::invert_transform(ude::Transform::positive, 0.0),
               std::domain_error);
  EXPECT_THROW(ude::invert_transform(ude::Transform::unit, 1.0),
               std::domain_error);
  EXPECT_THROW(ude::ConstApprox::from_natural(std::vector<double>{1.0, 2.0},
                                              {ude::Transform::identity}),
               ude::StructuralError);
}

TEST(LinearApprox, Examples) {
  const ude::Approximator a = ude::LinearApprox{4.0};
  EXPECT_EQ(eval(a, {1.0})[0], 4.0);
  EXPECT_EQ(eval(a, {0.0})[0], 0.0);
  EXPECT_THROW(eval(a, {1.0, 2.0}), ude::StructuralError);
}

TEST(LinearApprox, IsAdditive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  // Additivity is exact when the products are exactly representable; use
  // dyadic values so that floating point rounding cannot interfere.
  for (int k = 0; k < 200; ++k) {
    const double a = std::ldexp(std::round(u(rng) * 64), -6);
    const double x1 = std::ldexp(std::round(u(rng) * 64), -6);
    const double x2 = std::ldexp(std::round(u(rng) * 64), -6);
    const ude::Approximator m = ude::LinearApprox{a};
    EXPECT_EQ(eval(m, {x1 + x2})[0], eval(m, {x1})[0] + eval(m, {x2})[0]);
  }
}

TEST(MlpApprox, ZeroNetworkGivesOneHalf) {
  const ude::Approximator a = ude::MlpApprox({5, 16, 1});
  EXPECT_EQ(eval(a, {0.9, 0.1, 0.0, 1.0, 0.0})[0], 0.5);
  EXPECT_EQ(eval(a, {-40.0, 3.0, 7.0, 1.0, 1.0})[0], 0.5);
}

TEST(MlpApprox, Shapes) {
  const ude::MlpApprox m({5, 16, 1});
  EXPECT_EQ(m.params.size(), 16u * 5 + 16 + 1 * 16 + 1);
  EXPECT_EQ(m.weight_offset(0), 0u);
  EXPECT_EQ(m.weight_offset(1), 16u * 5 + 16);
  EXPECT_THROW(ude::MlpApprox({5}), ude::StructuralError);
  EXPECT_THROW(ude::MlpApprox({5, 0, 1}), ude::StructuralError);
  const ude::Approximator a = m;
  EXPECT_THROW(eval(a, {1.0, 2.0}), ude::StructuralError);
}

TEST(MlpApprox, HandComputedForwardPass) {
  ude::MlpApprox m({2, 2, 1});
  // W1 = [[1, -1], [0.5, 2]], b1 = [0.1, -0.2], W2 = [[1.5, -0.5]], b2 = [0.3]
  m.params = {1.0, -1.0, 0.5, 2.0, 0.1, -0.2, 1.5, -0.5, 0.3};
  const double h0 = std::tanh(1.0 * 0.4 - 1.0 * 0.7 + 0.1);
  const double h1 = std::tanh(0.5 * 0.4 + 2.0 * 0.7 - 0.2);
  const double z = 1.5 * h0 - 0.5 * h1 + 0.3;
  EXPECT_NEAR(eval(m, {0.4, 0.7})[0], 1.0 / (1.0 + std::exp(-z)), 1e-15);
}

TEST(MlpApprox, OutputStaysInUnitInterval) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const auto a = ude::approx_init(ude::Family::mlp, k, ude::InitRanges{});
    for (int j = 0; j < 20; ++j) {
      const double y = eval(a, {u(rng), u(rng), u(rng), u(rng), u(rng)})[0];
      EXPECT_GT(y, 0.0);
      EXPECT_LT(y, 1.0);
    }
  }
}

TEST(MlpApprox, GradientsMatchFiniteDifferencesOnRandomNetworks) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int net = 0; net < 20; ++net) {
    auto a = ude::approx_init(ude::Family::mlp, 100 + net, ude::InitRanges{});
    // Nonzero biases so that their gradients are exercised too.
    auto p = ude::get_params(a);
    for (double& v : p) v += 0.1 * (u(rng) - 0.5);
    ude::set_params(a, p);
    const std::vector<double> in{u(rng), u(rng), u(rng), std::round(u(rng)),
                                 std::round(u(rng))};
    const ude::ParamVector theta(p);
    const auto taped = ude::tape_eval(
        [&](std::span<const ude::Var> th) {
          std::vector<ude::Var> x(in.begin(), in.end());
          ude::Var out[1];
          ude::approx_eval<ude::Var>(a, th, x, out);
          return out[0];
        },
        theta);
    const auto g = ude::grad(taped, theta);
    const auto fd = ude::finite_diff_gradient(
        [&](std::span<const double> th) {
          double out[1] = {0.0};
          ude::approx_eval<double>(a, th, in, out);
          return out[0];
        },
        theta, 1e-6);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double scale = std::max(std::abs(fd[i]), 1e-3);
      ASSERT_LE(std::abs(g[i] - fd[i]) / scale, 1e-4)
          << "network " << net << " weight " << i;
    }
  }
}

TEST(ApproxInit, DeterministicAndInsideRanges) {
  const auto r = rc_ranges();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = ude::approx_init(ude::Family::constant, seed, r);
    const auto b = ude::approx_init(ude::Family::constant, seed, r);
    EXPECT_EQ(ude::get_params(a), ude::get_params(b));
    const auto nat = std::get<ude::ConstApprox>(a).natural();
    EXPECT_GE(nat[0], 2.0);
    EXPECT_LE(nat[0], 6.0);
    EXPECT_GE(nat[1], 5.0);
    EXPECT_LE(nat[1], 10.0);
    const auto lin = ude::approx_init(ude::Family::linear, seed, r);
    EXPECT_GE(std::get<ude::LinearApprox>(lin).a, 2.0);
    EXPECT_LE(std::get<ude::LinearApprox>(lin).a, 6.0);
  }
}

TEST(ApproxInit, GlorotWeightsAndZeroBiases) {
  const auto a = ude::approx_init(ude::Family::mlp, 9, ude::InitRanges{});
  const auto& m = std::get<ude::MlpApprox>(a);
  const double r1 = std::sqrt(6.0 / 21.0), r2 = std::sqrt(6.0 / 17.0);
  for (std::size_t k = 0; k < 80; ++k) EXPECT_LE(std::abs(m.params[k]), r1);
  for (std::size_t k = 80; k < 96; ++k) EXPECT_EQ(m.params[k], 0.0);
  for (std::size_t k = 96; k < 112; ++k) EXPECT_LE(std::abs(m.params[k]), r2);
  EXPECT_EQ(m.params[112], 0.0);
  EXPECT_NE(ude::get_params(a),
            ude::get_params(ude::approx_init(ude::Family::mlp, 10, {})));
}

TEST(ApproxJson, RoundTripsEveryFamily) {
  const std::vector<ude::Approximator> all = {
      ude::approx_init(ude::Family::constant, 1, rc_ranges()),
      ude::LinearApprox{3.25},
      ude::approx_init(ude::Family::mlp, 2, ude::InitRanges{}),
  };
  for (const auto& a : all) {
    const auto j = ude::approx_to_json(a);
    const auto b = ude::approx_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(ude::family_of(a), ude::family_of(b));
    EXPECT_EQ(ude::get_params(a), ude::get_params(b));
  }
  EXPECT_THROW(ude::approx_from_json({{"family", "gp"}, {"params", {1.0}}}),
               std::invalid_argument);
}

TEST(ApproxParams, SetRejectsWrongLength) {
  ude::Approximator a = ude::LinearApprox{1.0};
  EXPECT_THROW(ude::set_params(a, std::vector<double>{1.0, 2.0}),
               ude::StructuralError);
}
