#include "paraplan/policy.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace paraplan {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(ParamCount, MatchesKnownArchitectures) {
  EXPECT_EQ(param_count({{5, 2, 2}}), 18);
  EXPECT_EQ(param_count({{5, 10, 2}}), 82);
  EXPECT_EQ(param_count({{5, 10, 10, 2}}), 192);
}

TEST(MlpArchitecture, ValidateRejectsBadShapes) {
  const auto validate = [](std::vector<int> sizes) {
    MlpArchitecture{std::move(sizes)}.validate();
  };
  EXPECT_THROW(validate({5}), std::invalid_argument);
  EXPECT_THROW(validate({4, 2, 2}), std::invalid_argument);
  EXPECT_THROW(validate({5, 2, 3}), std::invalid_argument);
  EXPECT_THROW(validate({5, 0, 2}), std::invalid_argument);
  EXPECT_NO_THROW(validate({5, 7, 7, 2}));
}

TEST(MlpPolicy, ZeroParametersGiveZeroAction) {
  const MlpPolicy policy(MlpArchitecture{{5, 2, 2}});
  const std::vector<double> theta(policy.param_count(), 0.0);
  const ControlAction a = policy.forward(theta, {0.3, -0.7, 0.1, 0.9, -0.2});
  EXPECT_EQ(a.a0, 0.0);
  EXPECT_EQ(a.a1, 0.0);
}

TEST(MlpPolicy, SingleWeightPathMatchesHandComputation) {
  // First input wired through one hidden unit with unit weights: channel 0
  // computes tanh(tanh(s0)).
  const MlpPolicy policy(MlpArchitecture{{5, 2, 2}});
  std::vector<double> theta(18, 0.0);
  theta[0] = 1.0;   // layer 1, row 0, weight on s0
  theta[12] = 1.0;  // layer 2, row 0, weight on hidden unit 0
  const ControlAction a = policy.forward(theta, {1.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(a.a0, 0.6420149920119997, 1e-12);  // tanh(tanh(1))
  EXPECT_EQ(a.a1, 0.0);
}

TEST(MlpPolicy, OutputsStayStrictlyInsideUnitBox) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> w(-8.0, 8.0);
  std::uniform_real_distribution<double> f(-3.0, 3.0);
  const MlpPolicy policy(MlpArchitecture{{5, 4, 2}});
  std::vector<double> theta(policy.param_count());
  for (int i = 0; i < 10000; ++i) {
    for (double& t : theta) t = w(rng);
    const ControlAction a =
        policy.forward(theta, {f(rng), f(rng), f(rng), f(rng), f(rng)});
    // tanh rounds to +-1.0 exactly for large pre-activations, so the bound
    // is inclusive in double precision.
    EXPECT_LE(std::abs(a.a0), 1.0);
    EXPECT_LE(std::abs(a.a1), 1.0);
  }
}

TEST(MlpPolicy, ForwardIsDeterministic) {
  const MlpPolicy policy(MlpArchitecture{{5, 10, 2}});
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  std::vector<double> theta(policy.param_count());
  for (double& t : theta) t = w(rng);
  const FeatureVector s{0.4, -0.2, 0.05, 1.1, -0.6};
  const ControlAction a = policy.forward(theta, s);
  const ControlAction b = policy.forward(theta, s);
  EXPECT_EQ(a.a0, b.a0);
  EXPECT_EQ(a.a1, b.a1);
}

TEST(MlpPolicy, ParamCountMatchesAcceptedLength) {
  for (const std::vector<int>& sizes :
       {std::vector<int>{5, 2, 2}, {5, 10, 2}, {5, 10, 10, 2}}) {
    const MlpPolicy policy(MlpArchitecture{sizes});
    EXPECT_EQ(policy.param_count(), param_count(MlpArchitecture{sizes}));
    const std::vector<double> ok(policy.param_count(), 0.1);
    EXPECT_NO_THROW(policy.forward(ok, {0, 0, 0, 0, 0}));
    const std::vector<double> bad(policy.param_count() + 1, 0.1);
    EXPECT_THROW(policy.forward(bad, {0, 0, 0, 0, 0}), std::invalid_argument);
  }
}

TEST(BuildFeatures, ZeroErrorPassesThroughPreviousSteering) {
  const VehicleState ev{4.0, -2.0, 0.3, 7.0};
  const GoalSetpoint goal{4.0, -2.0, 0.3, 7.0};
  const FeatureVector s = build_features(ev, goal, 0.3, {});
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(s[2], 0.0);
  EXPECT_EQ(s[3], 0.0);
  EXPECT_EQ(s[4], 0.3);
}

TEST(BuildFeatures, ForwardGoalNormalizesToOne) {
  const FeatureVector s =
      build_features({0, 0, 0, 10.0}, {30.0, 0, 0, 10.0}, 0.0, {});
  EXPECT_NEAR(s[0], 1.0, 1e-12);
  EXPECT_EQ(s[1], 0.0);
  EXPECT_EQ(s[2], 0.0);
  EXPECT_EQ(s[3], 0.0);
}

TEST(BuildFeatures, HeadingErrorIsWrapped) {
  const FeatureVector s =
      build_features({0, 0, 0, 0}, {0, 0, 350.0 * kPi / 180.0, 0}, 0.0, {});
  EXPECT_NEAR(s[2], -0.027777777777777776, 1e-12);
}

}  // namespace
}  // namespace paraplan
