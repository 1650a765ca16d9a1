//
// Copyright 2026 The Leakscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "leakscope/gain.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "leakscope/expr.hpp"
#include "leakscope/oracles.hpp"
#include "test_util.hpp"

namespace leakscope {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using testing::thrown_kind;

bool check_ok(const HypothesisReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c.ok;
  }
  ADD_FAILURE() << "no check named " << name;
  return false;
}

TEST(ExpressionTest, EvaluatesGrammar) {
  EXPECT_DOUBLE_EQ(Expression::parse("1-(1-t)^2")(0.25), 1.0 - 0.75 * 0.75);
  EXPECT_DOUBLE_EQ(Expression::parse("min(3*t, 1/2)")(0.1), 0.3);
  EXPECT_DOUBLE_EQ(Expression::parse("max(t, -t + 1)")(0.25), 0.75);
  EXPECT_NEAR(Expression::parse("sin(t) + log(t + 1)")(0.5), std::sin(0.5) + std::log(1.5), 1e-15);
  EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0.0), -4.0);
  EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0.0), 512.0);
}

TEST(ExpressionTest, RejectsMalformedInput) {
  for (const char* bad : {"", "t +", "(t", "foo(t)", "t t", "min(t)", "1..2"}) {
    EXPECT_EQ(thrown_kind([&] { Expression::parse(bad); }), ErrorKind::kParse) << bad;
  }
}

TEST(GainFamilyTest, ParsesSpecs) {
  EXPECT_EQ(GainFamily::parse("identity").kind(), GainFamily::Kind::kIdentity);
  EXPECT_EQ(GainFamily::parse("alpha:2.0").alpha_value(), 2.0);
  EXPECT_EQ(GainFamily::parse("log").kind(), GainFamily::Kind::kLog);
  EXPECT_EQ(GainFamily::parse("custom:min(3*t,1/2)").kind(), GainFamily::Kind::kCustom);
  EXPECT_EQ(thrown_kind([] { GainFamily::parse("alpha:1"); }), ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([] { GainFamily::parse("alpha:x"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { GainFamily::parse("square"); }), ErrorKind::kParse);
}

TEST(GainFunctionTest, GridFlags) {
  const auto f = GainFunction::from_expression("1-(1-t)^2").flags();
  EXPECT_TRUE(f.nonneg);
  EXPECT_TRUE(f.zero_at_zero);
  EXPECT_TRUE(f.concave);
  EXPECT_TRUE(f.continuous_at_zero);
  EXPECT_NEAR(*f.derivative_at_zero, 2.0, 1e-5);
  EXPECT_NEAR(f.sup_value, 1.0, 1e-12);

  const auto convex = GainFunction::from_expression("t^2").flags();
  EXPECT_FALSE(convex.concave);
  const auto jump = GainFunction::from_expression("max(1/2, t)").flags();
  EXPECT_FALSE(jump.zero_at_zero);
}

TEST(GainFunctionTest, RejectsInconsistentDeclaredFlags) {
  DeclaredFlags wrong;
  wrong.concave = true;
  EXPECT_EQ(thrown_kind([&] { GainFunction("square", [](double t) { return t * t; }, wrong); }),
            ErrorKind::kValidation);
  DeclaredFlags right;
  right.concave = false;
  right.zero_at_zero = true;
  EXPECT_EQ(thrown_kind([&] { GainFunction("square", [](double t) { return t * t; }, right); }),
            std::nullopt);
}

TEST(HypothesesTest, IdentityPassesBothSets) {
  EXPECT_TRUE(validate_hypotheses(GainFamily::identity(), HypothesisSet::kConcave).passed);
  EXPECT_TRUE(validate_hypotheses(GainFamily::identity(), HypothesisSet::kBounded).passed);
}

TEST(HypothesesTest, AlphaGainFailsOnlyTheDerivativeCheck) {
  const auto r = validate_hypotheses(GainFamily::alpha(2.0), HypothesisSet::kConcave);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(check_ok(r, "derivative_at_zero"));
  EXPECT_TRUE(check_ok(r, "concave"));
  for (double a : {1.5, 2.0, 10.0}) {
    EXPECT_TRUE(validate_hypotheses(GainFamily::alpha(a), HypothesisSet::kBounded).passed) << a;
  }
}

TEST(HypothesesTest, ClippedLinearGainPassesConcaveSet) {
  const auto g = GainFamily::parse("custom:min(3*t, 1/2)");
  EXPECT_TRUE(validate_hypotheses(g, HypothesisSet::kConcave).passed);
}

TEST(HypothesesTest, LogGainFailsBoundedSet) {
  const auto r = validate_hypotheses(GainFamily::log(), HypothesisSet::kBounded);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(check_ok(r, "zero_at_zero"));
}

TEST(MaxExpectedGainTest, ClosedForms) {
  const auto id = max_expected_gain(Pmf({0.7, 0.2, 0.1}), GainFamily::identity());
  EXPECT_DOUBLE_EQ(id.value, 0.7);
  EXPECT_THAT(id.strategy, ElementsAre(1.0, 0.0, 0.0));

  const auto al = max_expected_gain(Pmf({0.75, 0.25}), GainFamily::alpha(2.0));
  EXPECT_NEAR(al.value, 2.0 * std::sqrt(5.0 / 8), 1e-15);
  EXPECT_THAT(al.strategy, ElementsAre(DoubleNear(0.9, 1e-15), DoubleNear(0.1, 1e-15)));
  EXPECT_FALSE(al.approximate);

  const auto lg = max_expected_gain(Pmf({0.25, 0.25, 0.25, 0.25}), GainFamily::log());
  EXPECT_NEAR(lg.value, -std::log(4.0), 1e-15);
  EXPECT_THAT(lg.strategy, ElementsAre(0.25, 0.25, 0.25, 0.25));
}

TEST(MaxExpectedGainTest, NumericSolverMatchesAlphaClosedForm) {
  std::mt19937_64 rng(21);
  const auto custom = GainFamily::custom(
      GainFunction("alpha2", [](double t) { return 2.0 * std::sqrt(t); }));
  for (int i = 0; i < 20; ++i) {
    const Pmf p = random_pmf(rng, 2 + i % 3);
    const auto numeric = max_expected_gain(p, custom);
    EXPECT_NEAR(numeric.value, max_expected_gain(p, GainFamily::alpha(2.0)).value, 1e-4);
    ASSERT_TRUE(numeric.residual.has_value());
    EXPECT_LT(*numeric.residual, 1e-6);
    EXPECT_FALSE(numeric.approximate);
  }
}

TEST(MaxExpectedGainTest, NonConcaveResultIsApproximate) {
  const auto g = GainFamily::parse("custom:t^2");
  const auto r = max_expected_gain(Pmf({0.6, 0.4}), g);
  EXPECT_TRUE(r.approximate);
  EXPECT_NEAR(r.value, 0.6, 1e-9);
}

TEST(MaxExpectedGainTest, InvariantToRelabeling) {
  std::mt19937_64 rng(22);
  for (const auto& g : {GainFamily::identity(), GainFamily::alpha(3.0), GainFamily::log(),
                        GainFamily::parse("custom:1-(1-t)^2")}) {
    const Pmf p = random_pmf(rng, 4);
    auto v = p.probs();
    std::reverse(v.begin(), v.end());
    EXPECT_NEAR(max_expected_gain(p, g).value, max_expected_gain(Pmf(v), g).value, 1e-9)
        << g.to_string();
  }
}

}  // namespace
}  // namespace leakscope
