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
#include "leakscope/leakage.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "leakscope/oracles.hpp"
#include "test_util.hpp"

namespace leakscope {
namespace {

using testing::thrown_kind;

Channel bsc(double eps) { return Channel({{1 - eps, eps}, {eps, 1 - eps}}); }

Channel identity_channel(std::size_t n) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
  return Channel(rows);
}

Pmf uniform(std::size_t n) { return Pmf(std::vector<double>(n, 1.0 / n)); }

JointDist random_joint(std::mt19937_64& rng, int nx, int ny) {
  const auto r = random_pmf(rng, nx * ny, 0.7).probs();
  std::vector<std::vector<double>> m(nx, std::vector<double>(ny));
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) m[x][y] = r[x * ny + y];
  }
  return JointDist(m);
}

const JointDist kHandJoint({{0.54, 0.06}, {0.04, 0.36}});
const JointDist kIndependent({{0.12, 0.18}, {0.28, 0.42}});

TEST(MaximalLeakageTest, HandValues) {
  EXPECT_NEAR(maximal_leakage(uniform(4), identity_channel(4)), std::log(4.0), 1e-15);
  EXPECT_NEAR(maximal_leakage(Pmf({0.3, 0.7}), Channel({{0.4, 0.6}, {0.4, 0.6}})), 0.0, 1e-15);
  EXPECT_NEAR(maximal_leakage(Pmf({0.2, 0.8}), bsc(0.1)), std::log(1.8), 1e-15);
}

TEST(MaximalLeakageTest, DependsOnlyOnSupport) {
  const Channel ch({{0.5, 0.3, 0.2}, {0.1, 0.1, 0.8}, {0.3, 0.3, 0.4}});
  const double a = maximal_leakage(Pmf({0.2, 0.3, 0.5}), ch);
  EXPECT_NEAR(maximal_leakage(Pmf({0.6, 0.3, 0.1}), ch), a, 1e-15);
  EXPECT_NEAR(maximal_leakage(Pmf({0.5, 0.0, 0.5}), ch), std::log(1.2), 1e-15);
  EXPECT_LT(maximal_leakage(Pmf({0.5, 0.0, 0.5}), ch), a);
}

TEST(MaximalAlphaLeakageTest, HandValues) {
  for (double a : {1.5, 2.0, 5.0}) {
    EXPECT_NEAR(maximal_alpha_leakage(uniform(3), identity_channel(3), Order::finite(a)),
                std::log(3.0), 1e-9);
    EXPECT_NEAR(maximal_alpha_leakage(Pmf({0.3, 0.7}), Channel({{0.4, 0.6}, {0.4, 0.6}}),
                                      Order::finite(a)),
                0.0, 1e-12);
  }
  EXPECT_NEAR(maximal_alpha_leakage(Pmf({0.2, 0.8}), bsc(0.1), Order::infinity()),
              std::log(1.8), 1e-15);
}

// Grid over the input simplex at step 1e-3 of the order-alpha Arimoto
// mutual information, evaluated through its own formula.
TEST(MaximalAlphaLeakageTest, MatchesGridOracleOnBsc) {
  for (double a : {1.5, 2.0, 5.0}) {
    double best = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double q = i / 1000.0;
      best = std::max(best, arimoto_mi(Pmf({q, 1 - q}), bsc(0.1), Order::finite(a)));
    }
    EXPECT_NEAR(maximal_alpha_leakage(Pmf({0.5, 0.5}), bsc(0.1), Order::finite(a)), best, 1e-4);
  }
}

TEST(MaximalAlphaLeakageTest, RespectsSupportAndOrder) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10; ++i) {
    std::vector<std::vector<double>> rows;
    for (int x = 0; x < 3; ++x) rows.push_back(random_pmf(rng, 3, 0.5).probs());
    const Channel ch(rows);
    const Pmf px = random_pmf(rng, 3);
    double prev = 0.0;
    for (double a : {1.5, 2.0, 4.0, 10.0}) {
      const double v = maximal_alpha_leakage(px, ch, Order::finite(a));
      EXPECT_GE(v, prev - 1e-8);
      EXPECT_GE(v, arimoto_mi(px, ch, Order::finite(a)) - 1e-12);
      EXPECT_LE(v, maximal_leakage(px, ch) + 1e-12);
      prev = v;
    }
  }
}

TEST(MaximalAlphaLeakageTest, RejectsOrdersAtMostOne) {
  for (Order o : {Order::finite(0.5), Order::one()}) {
    EXPECT_EQ(thrown_kind([&] { maximal_alpha_leakage(uniform(2), bsc(0.1), o); }),
              ErrorKind::kUnsupportedOrder);
  }
}

TEST(MaximalGLeakageTest, IdentityEqualsMaximalLeakage) {
  const auto r = maximal_g_leakage(Pmf({0.6, 0.4}), bsc(0.1), GainFamily::identity());
  EXPECT_NEAR(r.value, std::log(1.8), 1e-15);
  EXPECT_FALSE(r.upper_bound_only);
}

TEST(MaximalGLeakageTest, QualifyingConcaveGain) {
  const auto r =
      maximal_g_leakage(uniform(3), identity_channel(3), GainFamily::parse("custom:1-(1-t)^2"));
  EXPECT_NEAR(r.value, std::log(3.0), 1e-15);
  EXPECT_FALSE(r.upper_bound_only);
  EXPECT_FALSE(r.notes.empty());
}

TEST(MaximalGLeakageTest, AlphaGainIsUpperBoundOnly) {
  const auto r = maximal_g_leakage(Pmf({0.6, 0.4}), bsc(0.1), GainFamily::alpha(2.0));
  EXPECT_TRUE(r.upper_bound_only);
  EXPECT_NEAR(r.value, std::log(1.8), 1e-15);
}

TEST(PointwiseTest, HandValues) {
  EXPECT_NEAR(pointwise_maximal_leakage(kHandJoint, "y0", GainFamily::identity()),
              std::log(0.54 / 0.58 / 0.6), 1e-15);
  EXPECT_NEAR(pointwise_maximal_leakage(kIndependent, 1, GainFamily::identity()), 0.0, 1e-15);
  const auto ident = joint_from(uniform(3), identity_channel(3));
  EXPECT_NEAR(pointwise_maximal_leakage(ident, 2, GainFamily::identity()), std::log(3.0), 1e-15);
}

TEST(PointwiseTest, ZeroMarginalAndGainChecks) {
  const JointDist j({{0.5, 0.0}, {0.5, 0.0}});
  EXPECT_EQ(thrown_kind([&] { pointwise_maximal_leakage(j, 1, GainFamily::identity()); }),
            ErrorKind::kZeroMarginal);
  EXPECT_EQ(thrown_kind([&] { pointwise_maximal_leakage(j, 0, GainFamily::log()); }),
            ErrorKind::kValidation);
  EXPECT_EQ(pointwise_maximal_leakage(j, 0, GainFamily::log(), true), 0.0);
  EXPECT_EQ(thrown_kind([&] {
              pointwise_maximal_leakage(j, 0, GainFamily::parse("custom:max(1/2, t)"));
            }),
            ErrorKind::kValidation);
}

TEST(VariantTest, HandValues) {
  const auto ident = joint_from(uniform(3), identity_channel(3));
  const auto g = GainFamily::identity();
  EXPECT_NEAR(opportunistic_maximal_g_leakage(kIndependent, g), 0.0, 1e-15);
  EXPECT_NEAR(maximal_realizable_g_leakage(kIndependent, g), 0.0, 1e-15);
  EXPECT_NEAR(opportunistic_maximal_g_leakage(ident, g), std::log(3.0), 1e-15);
  const double y0 = pointwise_maximal_leakage(kHandJoint, 0, g);
  const double y1 = pointwise_maximal_leakage(kHandJoint, 1, g);
  EXPECT_EQ(maximal_realizable_g_leakage(kHandJoint, g), std::max(y0, y1));
}

TEST(VariantTest, PerYRecombinationAndGainIndependence) {
  std::mt19937_64 rng(32);
  const std::vector<GainFamily> gains = {GainFamily::identity(), GainFamily::alpha(2.0),
                                         GainFamily::parse("custom:1-(1-t)^2")};
  for (int i = 0; i < 50; ++i) {
    const JointDist j = random_joint(rng, 3, 3);
    const auto py = j.py_raw();
    double avg = 0.0, top = 0.0;
    for (std::size_t y = 0; y < 3; ++y) {
      const double v = pointwise_maximal_leakage(j, y, gains[0]);
      avg += py[y] * std::exp(v);
      top = std::max(top, v);
    }
    const double opp = opportunistic_maximal_g_leakage(j, gains[0]);
    const double real = maximal_realizable_g_leakage(j, gains[0]);
    EXPECT_NEAR(std::exp(opp), avg, 1e-9);
    EXPECT_EQ(real, top);
    EXPECT_GE(real, opp - 1e-12);
    for (const auto& g : gains) {
      EXPECT_EQ(opportunistic_maximal_g_leakage(j, g), opp);
      EXPECT_EQ(maximal_realizable_g_leakage(j, g), real);
      EXPECT_EQ(pointwise_maximal_leakage(j, 1, g), pointwise_maximal_leakage(j, 1, gains[0]));
    }
    EXPECT_NEAR(opportunistic_report(j, gains[1]).value, opp, 0.0);
  }
}

TEST(VariantTest, BoundedByLogSumOfColumnMaxima) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 50; ++i) {
    const JointDist j = random_joint(rng, 3, 4);
    const Channel ch = j.channel();
    double s = 0.0;
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      double m = 0.0;
      for (std::size_t x = 0; x < ch.inputs(); ++x) m = std::max(m, ch(x, y));
      s += m;
    }
    for (const auto& g : {GainFamily::identity(), GainFamily::alpha(2.0)}) {
      EXPECT_LE(maximal_g_leakage(j.px(), ch, g).value, std::log(s) + 1e-12);
    }
  }
}

TEST(VariantTest, OrderOneVariantsAreInfinite) {
  const auto opp = alpha1_variant_report(kHandJoint, Alpha1Variant::kOpportunistic);
  const auto real = alpha1_variant_report(kHandJoint, Alpha1Variant::kRealizable);
  EXPECT_EQ(opp.value, kInf);
  EXPECT_EQ(real.value, kInf);
  const auto degenerate = alpha1_variant_report(JointDist({{0.5, 0.5}}), Alpha1Variant::kRealizable);
  EXPECT_EQ(degenerate.value, kInf);
  EXPECT_EQ(degenerate.notes.size(), 2u);
}

}  // namespace
}  // namespace leakscope
