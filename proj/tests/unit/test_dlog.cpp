// Copyright 2026 The ETDFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "etdfe/dlog.hpp"
#include "etdfe/error.hpp"
#include "etdfe/random.hpp"

namespace etdfe::group {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(DlogTest, SmallestTable) {
  const auto t = DlogTable::build(1);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.solve(GroupElement()), 0);
  EXPECT_EQ(t.solve(GroupElement::generator()), 1);
  EXPECT_EQ(t.solve(-GroupElement::generator()), -1);
  EXPECT_EQ(code_of([&] { t.solve(mul_generator(2)); }), ErrorCode::kOutOfRange);
}

TEST(DlogTest, SpecExamples) {
  const auto t = DlogTable::build(100);
  EXPECT_EQ(t.solve(mul_generator(57)), 57);
  EXPECT_EQ(t.solve(mul_generator(5)), 5);
  EXPECT_EQ(t.solve(mul_generator(-3)), -3);
  EXPECT_EQ(t.lookup(mul_generator(101)), std::nullopt);
}

TEST(DlogTest, ExhaustiveSmallRange) {
  const std::int64_t bound = 2000;
  const auto t = DlogTable::build(static_cast<std::uint64_t>(bound));
  GroupElement p = mul_generator(-bound);
  for (std::int64_t x = -bound; x <= bound; ++x) {
    ASSERT_EQ(t.solve(p), x);
    p += GroupElement::generator();
  }
  EXPECT_EQ(code_of([&] { t.solve(p); }), ErrorCode::kOutOfRange);
}

TEST(DlogTest, GiantStepsReachBeyondTable) {
  const auto t = DlogTable::build(64, 10000);
  EXPECT_EQ(t.reach(), 10000u);
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto x = rng.uniform_int(-10000, 10000);
    ASSERT_EQ(t.solve(mul_generator(x)), x);
  }
  EXPECT_EQ(t.solve(mul_generator(10000)), 10000);
  EXPECT_EQ(t.solve(mul_generator(-10000)), -10000);
  EXPECT_EQ(code_of([&] { t.solve(mul_generator(10001)); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { t.solve(mul_generator(-10001)); }), ErrorCode::kOutOfRange);
}

TEST(DlogTest, RandomPointIsOutOfRange) {
  SeededEntropy e(1);
  const auto t = DlogTable::build(1000);
  EXPECT_EQ(code_of([&] { t.solve(mul_generator(Scalar::random(e))); }),
            ErrorCode::kOutOfRange);
}

TEST(DlogTest, BuildPreconditions) {
  EXPECT_EQ(code_of([] { DlogTable::build(0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { DlogTable::build(std::uint64_t{1} << 27); }),
            ErrorCode::kBoundTooLarge);
  EXPECT_EQ(code_of([] { DlogTable::build(10, 5); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { DlogTable::build(2000, 0, 1000); }),
            ErrorCode::kBoundTooLarge);
}

TEST(DlogTest, FreeFunctionWrappers) {
  const auto t = dlog_build_table(50);
  EXPECT_EQ(dlog_solve(mul_generator(-50), t), -50);
}

}  // namespace
}  // namespace etdfe::group
