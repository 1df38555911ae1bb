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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "etdfe/attacks.hpp"
#include "etdfe/error.hpp"

namespace etdfe::attacks {
namespace {

DailyRecord record(std::vector<double> r) {
  DailyRecord rec;
  rec.meter_id = 1;
  rec.readings = std::move(r);
  return rec;
}

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

TEST(AttacksTest, NamesRoundTrip) {
  for (Attack a : kAllAttacks) EXPECT_EQ(parse_attack(attack_name(a)), a);
  EXPECT_EQ(parse_label("fraudulent"), Label::kFraudulent);
  EXPECT_THROW(parse_attack("f7"), Error);
}

TEST(AttacksTest, SampleParamsRanges) {
  Rng rng(1);
  double alpha_sum = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_params(rng);
    alpha_sum += p.alpha;
    ASSERT_GE(p.alpha, kFactorLo);
    ASSERT_LE(p.alpha, kFactorHi);
    ASSERT_EQ(p.beta.size(), kSlotsPerDay);
    for (double b : p.beta) {
      ASSERT_GE(b, kFactorLo);
      ASSERT_LE(b, kFactorHi);
    }
    ASSERT_GE(p.t_start, 0);
    ASSERT_LE(p.t_start, kStartMax);
    ASSERT_GE(p.duration, kDurationMin);
    ASSERT_LE(p.duration, kDurationMax);
    ASSERT_LE(p.t_end(kSlotsPerDay), kSlotsPerDay);
  }
  EXPECT_NEAR(alpha_sum / n, 0.35, 0.01);
}

TEST(AttacksTest, Examples) {
  AttackParams p;
  p.alpha = 0.5;
  EXPECT_EQ(apply_attack(record({2, 4}), Attack::kF1, p).readings,
            (std::vector<double>{1, 2}));
  EXPECT_EQ(apply_attack(record({1, 2, 3}), Attack::kF6, p).readings,
            (std::vector<double>{3, 2, 1}));
  EXPECT_EQ(apply_attack(record({1, 2, 3}), Attack::kF3, p).readings,
            (std::vector<double>{2, 2, 2}));
  p.t_start = 0;
  p.duration = 48;
  const auto zeroed = apply_attack(record(std::vector<double>(48, 1.5)), Attack::kF4, p);
  EXPECT_EQ(zeroed.readings, std::vector<double>(48, 0.0));
  EXPECT_EQ(zeroed.label, Label::kFraudulent);
  EXPECT_EQ(zeroed.attack, Attack::kF4);

  p.beta = {0.1, 0.2, 0.3};
  const auto f2 = apply_attack(record({10, 10, 10}), Attack::kF2, p);
  EXPECT_NEAR(f2.readings[2], 3.0, 1e-12);
  const auto f5 = apply_attack(record({1, 2, 3}), Attack::kF5, p);
  EXPECT_NEAR(f5.readings[1], 0.4, 1e-12);
}

TEST(AttacksTest, F4WindowIsHalfOpenAndClamped) {
  AttackParams p;
  p.t_start = 40;
  p.duration = 20;
  const auto out = apply_attack(record(std::vector<double>(48, 1.0)), Attack::kF4, p);
  for (std::size_t j = 0; j < 48; ++j) EXPECT_EQ(out.readings[j], j >= 40 ? 0.0 : 1.0);
  p.t_start = 3;
  p.duration = 6;
  const auto mid = apply_attack(record(std::vector<double>(48, 1.0)), Attack::kF4, p);
  EXPECT_EQ(std::count(mid.readings.begin(), mid.readings.end(), 0.0), 6);
  EXPECT_EQ(mid.readings[2], 1.0);
  EXPECT_EQ(mid.readings[9], 1.0);
}

TEST(AttacksTest, RejectsAttackedInput) {
  auto rec = record({1, 2});
  rec.label = Label::kFraudulent;
  EXPECT_THROW(apply_attack(rec, Attack::kF1, AttackParams{}), Error);
}

TEST(AttacksTest, ExpandSizesAndZeroFixedPoint) {
  Rng rng(4);
  std::vector<DailyRecord> honest;
  for (std::uint32_t i = 0; i < 536; ++i) {
    auto r = record(std::vector<double>(48, 0.5));
    r.day_index = i;
    honest.push_back(r);
  }
  const auto all = expand_dataset(honest, rng);
  EXPECT_EQ(all.size(), 536u * 7);
  const auto fraud = std::count_if(all.begin(), all.end(), [](const auto& r) {
    return r.label == Label::kFraudulent;
  });
  EXPECT_EQ(fraud, 3216);

  const auto zero = expand_dataset({record(std::vector<double>(48, 0.0))}, rng);
  ASSERT_EQ(zero.size(), 7u);
  for (const auto& r : zero) EXPECT_EQ(r.readings, std::vector<double>(48, 0.0));
  EXPECT_THROW(expand_dataset({}, rng), Error);
}

TEST(AttacksTest, ExpandIsDeterministic) {
  std::vector<DailyRecord> honest{record(std::vector<double>(48, 1.0)),
                                  record(std::vector<double>(48, 2.0))};
  Rng a(9), b(9);
  EXPECT_EQ(expand_dataset(honest, a), expand_dataset(honest, b));
}

// Bill-reduction properties on random strictly positive records.
TEST(AttacksTest, SumProperties) {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    std::vector<double> r(48);
    for (double& v : r) v = rng.uniform(0.01, 4.0);
    const auto rec = record(r);
    const double s = sum(r);
    for (Attack a : kAllAttacks) {
      const auto out = apply_attack(rec, a, sample_params(rng));
      for (double v : out.readings) ASSERT_GE(v, 0.0);
      const double t = sum(out.readings);
      switch (a) {
        case Attack::kF1:
        case Attack::kF2:
        case Attack::kF5:
          EXPECT_LT(t, s);
          break;
        case Attack::kF4:
          EXPECT_LE(t, s);
          break;
        case Attack::kF3:
        case Attack::kF6:
          EXPECT_NEAR(t, s, 1e-12 * s);
          break;
      }
    }
  }
}

}  // namespace
}  // namespace etdfe::attacks
