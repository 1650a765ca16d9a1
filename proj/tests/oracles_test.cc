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
#include "leakscope/oracles.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "leakscope/leakage.hpp"
#include "test_util.hpp"

namespace leakscope {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using testing::thrown_kind;

const Order kTwo = Order::finite(2.0);

Channel identity_channel(std::size_t n) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1.0;
  return Channel(rows);
}

Pmf uniform(std::size_t n) { return Pmf(std::vector<double>(n, 1.0 / n)); }

TEST(RandomPmfTest, StrictlyPositiveAndDeterministic) {
  std::mt19937_64 a(5), b(5);
  const Pmf p = random_pmf(a, 6, 0.1), q = random_pmf(b, 6, 0.1);
  EXPECT_EQ(p.probs(), q.probs());
  EXPECT_EQ(p.support_size(), 6u);
}

TEST(ShatterTest, SplitsEachInputUniformly) {
  const Channel ch = shattered_channel(Pmf({0.5, 0.5}), ShatterConfig::per_input({2, 3}));
  EXPECT_EQ(ch.outputs(), 5u);
  EXPECT_THAT(ch.row(0), ElementsAre(0.5, 0.5, 0.0, 0.0, 0.0));
  EXPECT_THAT(ch.row(1), ElementsAre(0.0, 0.0, DoubleNear(1.0 / 3, 1e-15), DoubleNear(1.0 / 3, 1e-15),
                                     DoubleNear(1.0 / 3, 1e-15)));
  EXPECT_EQ(ch.output()[2], "x1#0");
}

TEST(ShatterTest, DistinguishedSymbolStaysWhole) {
  const auto cfg = ShatterConfig::distinguished(3, 1, 4);
  EXPECT_THAT(cfg.sizes, ElementsAre(4, 1, 4));
  EXPECT_EQ(thrown_kind([] { ShatterConfig::per_input({1, 0}); }), ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([&] { shattered_channel(Pmf({0.5, 0.0, 0.5}), cfg); }),
            ErrorKind::kValidation);
}

// Without splitting the identity gain only compares the two maxima; once the
// other symbols are diluted the ratio at x* takes over.
TEST(VariationalTest, IdentityGainIsExactOnceSplit) {
  const Pmf p({0.5, 0.5}), q({0.25, 0.75});
  EXPECT_NEAR(variational_dinf_lower(p, q, GainFamily::identity(), 1), std::log(0.5 / 0.75), 1e-15);
  for (int m : {10, 100, 10000}) {
    EXPECT_NEAR(variational_dinf_lower(p, q, GainFamily::identity(), m), std::log(2.0), 1e-15);
  }
}

TEST(VariationalTest, ConvergesMonotonicallyFromBelow) {
  std::mt19937_64 rng(51);
  for (const auto& g : {GainFamily::alpha(2.0), GainFamily::log()}) {
    for (int i = 0; i < 10; ++i) {
      const Pmf p = random_pmf(rng, 4), q = random_pmf(rng, 4);
      const double dinf = renyi_divergence(p, q, Order::infinity());
      double prev = -kInf;
      for (int m : {1, 10, 100, 1000, 10000}) {
        const double v = variational_dinf_lower(p, q, g, m);
        EXPECT_GE(v, prev - 1e-12);
        EXPECT_LE(v, dinf + 1e-12);
        prev = v;
      }
    }
  }
}

TEST(VariationalTest, AbsoluteContinuityFailureIsInfinite) {
  EXPECT_EQ(variational_dinf_lower(Pmf({0.5, 0.5}), Pmf({1.0, 0.0}), GainFamily::identity(), 10),
            kInf);
}

TEST(VariationalTest, RejectsOutOfRangeSplitAndUnboundedGain) {
  const Pmf p({0.5, 0.5});
  EXPECT_EQ(thrown_kind([&] { variational_dinf_lower(p, p, GainFamily::identity(), 0); }),
            ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([&] { variational_dinf_lower(p, p, GainFamily::identity(), 10001); }),
            ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([&] {
              variational_dinf_lower(p, p, GainFamily::parse("custom:max(1/2, t)"), 5);
            }),
            ErrorKind::kValidation);
}

TEST(VariationalTest, DinfFormsCoincide) {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 100; ++i) {
    const Pmf p = random_pmf(rng, 5), q = random_pmf(rng, 5);
    const auto f = variational_dinf_forms(p, q);
    EXPECT_NEAR(f.form_a, f.dinf, 1e-12);
    EXPECT_NEAR(f.form_b, f.dinf, 1e-12);
  }
}

TEST(ProjectionTest, LandsOnBoxSimplex) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unit(-2.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(5);
    for (auto& x : v) x = unit(rng);
    const int k = 1 + i % 4;
    const auto t = project_box_simplex(v, k);
    EXPECT_NEAR(std::accumulate(t.begin(), t.end(), 0.0), k, 1e-12);
    for (double x : t) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(BruteForceTest, MatchesClosedFormOnWorkedCase) {
  const Pmf p({0.375, 0.375, 0.25});
  const auto b = brute_force_min_alpha_loss(p, 2, kTwo);
  EXPECT_NEAR(b.loss, min_expected_alpha_loss(p, 2, kTwo), 1e-9);
  EXPECT_THAT(b.t, ElementsAre(DoubleNear(9.0 / 11, 1e-6), DoubleNear(9.0 / 11, 1e-6),
                               DoubleNear(4.0 / 11, 1e-6)));
}

TEST(BruteForceTest, MatchesClosedFormAcrossOrders) {
  std::mt19937_64 rng(54);
  for (int i = 0; i < 30; ++i) {
    const Pmf p = random_pmf(rng, 3 + i % 4, 0.5);
    const int k = 1 + i % 2;
    for (Order o : {Order::finite(0.5), Order::one(), Order::finite(5.0), Order::infinity()}) {
      EXPECT_NEAR(brute_force_min_alpha_loss(p, k, o).loss, min_expected_alpha_loss(p, k, o), 1e-6);
    }
  }
}

TEST(BruteForceTest, RejectsDegenerateK) {
  EXPECT_EQ(thrown_kind([] { brute_force_min_alpha_loss(Pmf({0.5, 0.5}), 2, kTwo); }),
            ErrorKind::kValidation);
}

TEST(LpTest, WorkedCases) {
  EXPECT_TRUE(lp_feasibility_admissible({1.0, 1.0, 0.0}, 2));
  EXPECT_FALSE(lp_feasibility_admissible({1.4, 0.4, 0.2}, 2));
  const auto sol = lp_admissible_weights({0.9, 0.7, 0.4}, 2);
  ASSERT_TRUE(sol.feasible);
  std::vector<double> cover(3, 0.0);
  double total = 0.0;
  for (const auto& e : sol.weights) {
    EXPECT_GE(e.weight, 0.0);
    total += e.weight;
    for (auto i : e.subset) cover[i] += e.weight;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THAT(cover, ElementsAre(DoubleNear(0.9, 1e-12), DoubleNear(0.7, 1e-12),
                                 DoubleNear(0.4, 1e-12)));
}

TEST(LpTest, AgreesWithClosedTestOnRandomVectors) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.2);
  for (int i = 0; i < 300; ++i) {
    const int n = 3 + i % 4, k = 2 + i % 2;
    if (k >= n) continue;
    std::vector<double> t(n);
    for (auto& x : t) x = unit(rng);
    const double s = std::accumulate(t.begin(), t.end(), 0.0);
    if (i % 3 != 0) {
      for (auto& x : t) x *= k / s;
    }
    EXPECT_EQ(lp_feasibility_admissible(t, k), is_admissible(t, k));
  }
}

TEST(MaxGDemoTest, IdentityGainEqualsMaximalLeakageAtEverySplit) {
  const Channel ch({{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.2, 0.6}});
  for (int m : {1, 10, 1000}) {
    EXPECT_NEAR(maxgleakage_lower_demo(uniform(3), ch, GainFamily::identity(), m),
                maximal_leakage(uniform(3), ch), 1e-12);
  }
}

TEST(MaxGDemoTest, QuadraticGainApproachesLogThree) {
  const auto g = GainFamily::parse("custom:1-(1-t)^2");
  double prev = -kInf;
  for (int m : {1, 10, 100, 1000}) {
    const double v = maxgleakage_lower_demo(uniform(3), identity_channel(3), g, m);
    EXPECT_GE(v, prev - 1e-9);
    EXPECT_LE(v, std::log(3.0) + 1e-12);
    prev = v;
  }
  EXPECT_GE(prev, std::log(3.0) - 0.05);
}

TEST(MaxGDemoTest, IndependentChannelGivesZero) {
  const Channel constant({{0.3, 0.7}, {0.3, 0.7}});
  for (int m : {1, 10, 100}) {
    EXPECT_NEAR(maxgleakage_lower_demo(Pmf({0.4, 0.6}), constant, GainFamily::parse("custom:1-(1-t)^2"), m),
                0.0, 1e-9);
  }
}

}  // namespace
}  // namespace leakscope
