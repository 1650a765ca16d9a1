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
#include "leakscope/io.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace leakscope {
namespace {

using testing::thrown_kind;

TEST(JsonInputTest, PxAndChannelDeriveJoint) {
  const auto inst = parse_instance(
      R"({"x_alphabet":["a","b"],"y_alphabet":["u","v"],"px":[0.5,0.5],)"
      R"("channel":[[0.9,0.1],[0.1,0.9]]})",
      "json");
  ASSERT_TRUE(inst.joint.has_value());
  EXPECT_DOUBLE_EQ((*inst.joint)(1, 0), 0.05);
  EXPECT_EQ(inst.joint->y_alphabet()[1], "v");
}

TEST(JsonInputTest, JointDerivesMarginalAndChannel) {
  const auto inst = parse_instance(R"({"joint":[[0.1,0.2],[0.3,0.4]]})", "json");
  ASSERT_TRUE(inst.px && inst.channel);
  EXPECT_NEAR((*inst.px)[1], 0.7, 1e-15);
  EXPECT_EQ(inst.px->alphabet()[0], "x0");
}

TEST(JsonInputTest, PairForDivergences) {
  const auto inst = parse_instance(R"({"alphabet":["h","t"],"p":[0.5,0.5],"q":[0.9,0.1]})", "json");
  ASSERT_TRUE(inst.p && inst.q);
  EXPECT_EQ(inst.q->alphabet()[1], "t");
}

TEST(JsonInputTest, Errors) {
  EXPECT_EQ(thrown_kind([] { parse_instance("{\"px\": [0.5", "json"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { parse_instance("[1,2]", "json"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { parse_instance(R"({"px":[0.5,0.6]})", "json"); }),
            ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([] { parse_instance(R"({"px":["a"]})", "json"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { parse_instance(R"({"channel":[[1.0]]})", "json"); }),
            ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([] { parse_instance(R"({"x_alphabet":["a"],"px":[0.5,0.5]})", "json"); }),
            ErrorKind::kAlphabetMismatch);
  EXPECT_EQ(thrown_kind([] { parse_instance("{}", "json"); }), ErrorKind::kValidation);
  EXPECT_EQ(thrown_kind([] { parse_instance("{}", "xml"); }), ErrorKind::kValidation);
}

TEST(CsvInputTest, HeaderRowAndSymbolColumn) {
  const auto inst = parse_instance(",u,v\na, 0.1,0.2\n\nb,0.3,0.4\n", "csv");
  ASSERT_TRUE(inst.joint.has_value());
  EXPECT_EQ(inst.joint->x_alphabet()[1], "b");
  EXPECT_EQ(inst.joint->y_alphabet()[0], "u");
  EXPECT_DOUBLE_EQ((*inst.joint)(0, 1), 0.2);
}

TEST(CsvInputTest, Errors) {
  EXPECT_EQ(thrown_kind([] { parse_instance(",u,v\na,0.5\n", "csv"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { parse_instance(",u\na,abc\n", "csv"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { parse_instance(",u\n", "csv"); }), ErrorKind::kParse);
  EXPECT_EQ(thrown_kind([] { parse_instance(",u,v\na,0.5,0.6\n", "csv"); }),
            ErrorKind::kValidation);
}

TEST(NumberCodecTest, RoundTripsIncludingInfinity) {
  for (double x : {0.0, 1.0 / 3, std::log(1.8), 1e-300, kInf, -kInf}) {
    const auto j = nlohmann::json::parse(json_number(x).dump());
    EXPECT_EQ(number_from_json(j), x);
  }
  EXPECT_EQ(thrown_kind([] { number_from_json(nlohmann::json("x")); }), ErrorKind::kParse);
}

}  // namespace
}  // namespace leakscope
