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

#include <numeric>
#include <set>
#include <vector>

#include "etdfe/error.hpp"
#include "etdfe/fe.hpp"
#include "etdfe/random.hpp"

namespace etdfe::fe {
namespace {

using group::GroupElement;
using group::Scalar;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// s . H(l) by plain point arithmetic, independent of the library's
// multi-scalar path.
GroupElement mask_oracle(const MeterSecretKey& k, const SlotLabel& l) {
  const auto h = group::hash_to_group_pair(l.bytes());
  return h.u0 * k.s[0] + h.u1 * k.s[1];
}

std::vector<SlotLabel> labels(std::size_t count, const std::string& epoch = "e") {
  std::vector<SlotLabel> out;
  for (std::size_t t = 1; t <= count; ++t) out.push_back(SlotLabel{epoch, t});
  return out;
}

const group::DlogTable& table() {
  static const auto t = group::DlogTable::build(1 << 16, 1 << 24);
  return t;
}

TEST(SlotLabelTest, BytesAndParse) {
  const SlotLabel l{"2026-10", 17};
  EXPECT_EQ(l.bytes(), "2026-10|17");
  EXPECT_EQ(SlotLabel::parse("2026-10|17"), l);
  EXPECT_THROW(SlotLabel::parse("nope"), Error);
  EXPECT_THROW(SlotLabel::parse("a|x"), Error);
}

TEST(KeygenTest, SizesAndIds) {
  SeededEntropy e(1);
  const auto two = keygen(2, e);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NE(two[0].meter_id, two[1].meter_id);
  EXPECT_NE(two[0].s, two[1].s);
  EXPECT_EQ(keygen(200, e).size(), 200u);
  EXPECT_EQ(code_of([&] { keygen(1, e); }), ErrorCode::kTooFewMeters);
}

TEST(MonitoringKeyTest, SmallScalarsAndFold) {
  MeterSecretKey a{1, {Scalar::from_int(1), Scalar::from_int(2)}};
  MeterSecretKey b{2, {Scalar::from_int(3), Scalar::from_int(4)}};
  const std::vector<MeterSecretKey> ab{a, b};
  const auto mk = derive_monitoring_key(ab);
  EXPECT_EQ(mk.dk[0], Scalar::from_int(4));
  EXPECT_EQ(mk.dk[1], Scalar::from_int(6));
  EXPECT_EQ(mk.meter_ids, (std::vector<MeterId>{1, 2}));

  MeterSecretKey single{9, {Scalar::from_int(5), Scalar::from_int(7)}};
  EXPECT_EQ(derive_monitoring_key(std::vector<MeterSecretKey>{single}).dk, single.s);
  EXPECT_EQ(code_of([] { derive_monitoring_key({}); }), ErrorCode::kEmptyFleet);
  EXPECT_THROW(derive_monitoring_key(std::vector<MeterSecretKey>{a, a}), Error);

  SeededEntropy e(2);
  const auto keys = keygen(200, e);
  Scalar s0, s1;
  for (const auto& k : keys) {
    s0 = s0 + k.s[0];
    s1 = s1 + k.s[1];
  }
  const auto big = derive_monitoring_key(keys);
  EXPECT_EQ(big.dk[0], s0);
  EXPECT_EQ(big.dk[1], s1);
}

TEST(EncryptTest, MatchesDefinition) {
  SeededEntropy e(3);
  const auto keys = keygen(2, e);
  const SlotLabel l{"e", 4};
  EXPECT_EQ(encrypt(keys[0], l, 0).c, mask_oracle(keys[0], l));
  EXPECT_EQ(encrypt(keys[0], l, 321).c,
            mask_oracle(keys[0], l) + group::mul_generator(321));
  const auto basis = group::hash_to_group_pair(l.bytes());
  EXPECT_EQ(encrypt(keys[0], l, basis, 9).c, encrypt(keys[0], l, 9).c);
  EXPECT_EQ(code_of([&] { encrypt(keys[0], l, kDefaultReadingMax + 1); }),
            ErrorCode::kReadingOutOfRange);
  EXPECT_EQ(code_of([&] { encrypt(keys[0], l, -1); }), ErrorCode::kReadingOutOfRange);
}

TEST(EncryptTest, FreshAcrossSlots) {
  SeededEntropy e(4);
  const auto keys = keygen(2, e);
  std::set<std::string> seen;
  for (std::uint64_t t = 1; t <= 200; ++t) {
    EXPECT_TRUE(seen.insert(encrypt(keys[0], SlotLabel{"e", t}, 42).c.hex()).second);
  }
}

TEST(AggregateTest, Examples) {
  SeededEntropy e(5);
  const auto keys = keygen(3, e);
  const auto mk = derive_monitoring_key(keys);
  const SlotLabel l{"e", 1};
  std::vector<Ciphertext> cts;
  const std::int64_t readings[] = {3, 5, 7};
  for (int i = 0; i < 3; ++i) cts.push_back(encrypt(keys[i], l, readings[i]));
  EXPECT_EQ(aggregate_decrypt(cts, mk, table()), 15);

  std::vector<Ciphertext> zeros;
  for (const auto& k : keys) zeros.push_back(encrypt(k, l, 0));
  EXPECT_EQ(aggregate_decrypt(zeros, mk, table()), 0);

  // Order of arrival does not matter.
  std::swap(cts[0], cts[2]);
  EXPECT_EQ(aggregate_decrypt(cts, mk, table()), 15);
}

TEST(AggregateTest, IncompleteOrMixedSlots) {
  SeededEntropy e(6);
  const auto keys = keygen(3, e);
  const auto mk = derive_monitoring_key(keys);
  std::vector<Ciphertext> cts;
  for (const auto& k : keys) cts.push_back(encrypt(k, SlotLabel{"e", 1}, 10));
  const std::vector<Ciphertext> missing(cts.begin(), cts.begin() + 2);
  EXPECT_EQ(code_of([&] { aggregate_decrypt(missing, mk, table()); }),
            ErrorCode::kIncompleteSlot);
  auto dup = cts;
  dup[2] = dup[1];
  EXPECT_EQ(code_of([&] { aggregate_decrypt(dup, mk, table()); }),
            ErrorCode::kIncompleteSlot);
  auto mixed = cts;
  mixed[2] = encrypt(keys[2], SlotLabel{"e", 2}, 10);
  EXPECT_EQ(code_of([&] { aggregate_decrypt(mixed, mk, table()); }),
            ErrorCode::kIncompleteSlot);
}

// Forcing a partial aggregate leaves the missing meter's mask in place, so
// the result is not the partial sum.
TEST(AggregateTest, PartialAggregateDoesNotDecryptToPartialSum) {
  SeededEntropy e(7);
  const auto keys = keygen(4, e);
  const auto mk = derive_monitoring_key(keys);
  Rng rng(7);
  for (std::uint64_t t = 1; t <= 20; ++t) {
    std::vector<Ciphertext> cts;
    std::vector<std::int64_t> r;
    for (const auto& k : keys) {
      r.push_back(rng.uniform_int(1, 500));
      cts.push_back(encrypt(k, SlotLabel{"e", t}, r.back()));
    }
    for (std::size_t drop = 0; drop < cts.size(); ++drop) {
      std::vector<Ciphertext> part;
      std::int64_t partial = 0;
      for (std::size_t i = 0; i < cts.size(); ++i) {
        if (i == drop) continue;
        part.push_back(cts[i]);
        partial += r[i];
      }
      const auto point = aggregate_point(part, mk);
      EXPECT_NE(point, group::mul_generator(partial));
      EXPECT_FALSE(table().lookup(point).has_value());
    }
  }
}

TEST(BillingTest, KeysMatchTermwiseOracle) {
  SeededEntropy e(8);
  const auto key = keygen(2, e)[0];
  const auto one = labels(1);
  EXPECT_EQ(derive_billing_key(key, std::vector<std::int64_t>{1}, one).dk,
            mask_oracle(key, one[0]));
  const auto slots = labels(48);
  const std::vector<std::int64_t> zero(48, 0);
  EXPECT_TRUE(derive_billing_key(key, zero, slots).dk.is_identity());

  Rng rng(8);
  std::vector<std::int64_t> rates(48);
  GroupElement expect;
  for (std::size_t t = 0; t < 48; ++t) {
    rates[t] = rng.uniform_int(-500, 500);
    expect += mask_oracle(key, slots[t]) * rates[t];
  }
  EXPECT_EQ(derive_billing_key(key, rates, slots).dk, expect);
  EXPECT_EQ(code_of([&] { derive_billing_key(key, rates, one); }),
            ErrorCode::kShapeMismatch);
}

TEST(BillingTest, Examples) {
  SeededEntropy e(9);
  const auto key = keygen(2, e)[0];
  const auto slots = labels(2);
  auto run = [&](std::vector<std::int64_t> rates, std::vector<std::int64_t> r) {
    std::vector<Ciphertext> cts;
    for (std::size_t t = 0; t < r.size(); ++t) cts.push_back(encrypt(key, slots[t], r[t]));
    return billing_decrypt(cts, derive_billing_key(key, rates, slots), table());
  };
  EXPECT_EQ(run({2, 3}, {10, 20}), 80);
  EXPECT_EQ(run({0, 0}, {10, 20}), 0);
  EXPECT_EQ(run({2, 3}, {0, 0}), 0);
  EXPECT_EQ(run({-2, 3}, {10, 1}), -17);
}

TEST(BillingTest, MisalignedPeriodRejected) {
  SeededEntropy e(10);
  const auto keys = keygen(2, e);
  const auto slots = labels(2);
  const std::vector<std::int64_t> rates{1, 1};
  const auto bk = derive_billing_key(keys[0], rates, slots);
  std::vector<Ciphertext> swapped{encrypt(keys[0], slots[1], 1),
                                  encrypt(keys[0], slots[0], 1)};
  EXPECT_EQ(code_of([&] { billing_decrypt(swapped, bk, table()); }),
            ErrorCode::kShapeMismatch);
  std::vector<Ciphertext> other{encrypt(keys[1], slots[0], 1),
                                encrypt(keys[1], slots[1], 1)};
  EXPECT_EQ(code_of([&] { billing_decrypt(other, bk, table()); }),
            ErrorCode::kShapeMismatch);
}

TEST(DetectionTest, SelectorAndCounts) {
  SeededEntropy e(11);
  const auto key = keygen(2, e)[0];
  quantize::IntMatrix sel(2, 1);
  sel.at(0, 0) = 1;
  const auto two = labels(2);
  const auto dks = derive_detection_keys(key, sel, two);
  ASSERT_EQ(dks.keys.size(), 1u);
  EXPECT_EQ(dks.keys[0], mask_oracle(key, two[0]));

  const auto slots = labels(48);
  EXPECT_EQ(derive_detection_keys(key, quantize::IntMatrix(48, 40), slots).keys.size(),
            40u);
  EXPECT_EQ(code_of([&] { derive_detection_keys(key, quantize::IntMatrix(48, 48), slots); }),
            ErrorCode::kPrivacyViolation);
  EXPECT_EQ(code_of([&] { derive_detection_keys(key, quantize::IntMatrix(47, 4), slots); }),
            ErrorCode::kShapeMismatch);
}

TEST(DetectionTest, Examples) {
  SeededEntropy e(12);
  const auto key = keygen(2, e)[0];
  const auto slots = labels(3);
  quantize::IntMatrix w(3, 2);
  for (std::size_t t = 0; t < 3; ++t) w.at(t, 0) = 1;  // column 1 stays zero
  std::vector<Ciphertext> cts;
  const std::int64_t r[] = {2, 4, 6};
  for (std::size_t t = 0; t < 3; ++t) cts.push_back(encrypt(key, slots[t], r[t]));
  const auto dks = derive_detection_keys(key, w, slots);
  EXPECT_EQ(detection_decrypt(cts, dks, w, table()), (std::vector<std::int64_t>{12, 0}));

  auto other = w;
  other.at(0, 1) = 5;
  EXPECT_EQ(code_of([&] { detection_decrypt(cts, dks, other, table()); }),
            ErrorCode::kKeyModelMismatch);
}

TEST(DetectionTest, RandomMatrixMatchesOracle) {
  SeededEntropy e(13);
  const auto key = keygen(2, e)[0];
  const auto slots = labels(48);
  Rng rng(13);
  quantize::IntMatrix w(48, 16);
  for (auto& v : w.data) v = static_cast<std::int32_t>(rng.uniform_int(-300, 300));
  std::vector<std::int64_t> r(48);
  std::vector<Ciphertext> cts;
  for (std::size_t t = 0; t < 48; ++t) {
    r[t] = rng.uniform_int(0, 400);
    cts.push_back(encrypt(key, slots[t], r[t]));
  }
  std::vector<std::int64_t> expect(16, 0);
  for (std::size_t j = 0; j < 16; ++j) {
    for (std::size_t t = 0; t < 48; ++t) expect[j] += r[t] * w.at(t, j);
  }
  EXPECT_EQ(detection_decrypt(cts, derive_detection_keys(key, w, slots), w, table()),
            expect);
}

}  // namespace
}  // namespace etdfe::fe
