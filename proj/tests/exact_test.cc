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
#include "leakscope/exact.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace leakscope {
namespace {

TEST(FractionTest, RecoversSmallFractions) {
  EXPECT_EQ(*as_fraction(9.0 / 11), Rational(9, 11));
  EXPECT_EQ(*as_fraction(0.6), Rational(3, 5));
  EXPECT_EQ(*as_fraction(-0.25), Rational(-1, 4));
  EXPECT_EQ(*as_fraction(2.0), Rational(2));
  EXPECT_FALSE(as_fraction(0.34168760482230015).has_value());
  EXPECT_FALSE(as_fraction(std::sqrt(2.0)).has_value());
}

TEST(FractionTest, DisplayAnnotatesOnlyNonIntegers) {
  EXPECT_EQ(display_number(9.0 / 11), "0.818181818182 (9/11)");
  EXPECT_EQ(display_number(1.0), "1");
  EXPECT_EQ(display_number(kInf), "+inf");
  EXPECT_EQ(display_number(std::log(2.0)), "0.69314718056");
}

TEST(CoverageTest, ExactPathOnRationals) {
  const auto r = coverage_from_weights<Rational>({Rational(3, 8), Rational(1, 4), Rational(3, 16),
                                                  Rational(3, 16)},
                                                 3);
  EXPECT_EQ(r.s_star, 2);
  EXPECT_EQ(r.t, (std::vector<Rational>{Rational(1), Rational(4, 5), Rational(3, 5), Rational(3, 5)}));
}

TEST(ExamplesTest, AllFiveCasesMatchExactly) {
  const auto outcomes = reproduce_examples();
  ASSERT_EQ(outcomes.size(), 5u);
  for (const auto& o : outcomes) {
    EXPECT_TRUE(o.exact_match) << o.spec.name;
    EXPECT_TRUE(o.fractions_recovered) << o.spec.name;
    EXPECT_LE(o.max_abs_error, 1e-12) << o.spec.name;
    EXPECT_EQ(o.s_star, o.spec.expected_s_star) << o.spec.name;
    Rational total(0);
    for (const auto& x : o.t_exact) total += x;
    EXPECT_EQ(total, Rational(o.spec.k)) << o.spec.name;
  }
}

}  // namespace
}  // namespace leakscope
