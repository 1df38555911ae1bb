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
#include <openssl/bn.h>

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "etdfe/error.hpp"
#include "etdfe/group.hpp"
#include "etdfe/random.hpp"

namespace etdfe::group {
namespace {

// Independent modular arithmetic through BIGNUM, used as the oracle for
// Scalar. q is the P-256 group order.
struct BnOracle {
  using Ptr = std::unique_ptr<BIGNUM, decltype(&BN_free)>;
  BN_CTX* ctx = BN_CTX_new();
  Ptr q{nullptr, BN_free};

  BnOracle() {
    BIGNUM* raw = nullptr;
    BN_hex2bn(&raw,
              "FFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551");
    q.reset(raw);
  }
  ~BnOracle() { BN_CTX_free(ctx); }

  Ptr from(const Scalar& s) const {
    Ptr out(BN_lebin2bn(s.bytes().data(), kScalarBytes, nullptr), BN_free);
    return out;
  }
  std::string hex(const BIGNUM* b) const {
    std::array<std::uint8_t, kScalarBytes> le{};
    BN_bn2lebinpad(b, le.data(), kScalarBytes);
    return to_hex(le);
  }
  std::string add(const Scalar& a, const Scalar& b) const {
    Ptr r(BN_new(), BN_free);
    BN_mod_add(r.get(), from(a).get(), from(b).get(), q.get(), ctx);
    return hex(r.get());
  }
  std::string sub(const Scalar& a, const Scalar& b) const {
    Ptr r(BN_new(), BN_free);
    BN_mod_sub(r.get(), from(a).get(), from(b).get(), q.get(), ctx);
    return hex(r.get());
  }
  std::string mul(const Scalar& a, const Scalar& b) const {
    Ptr r(BN_new(), BN_free);
    BN_mod_mul(r.get(), from(a).get(), from(b).get(), q.get(), ctx);
    return hex(r.get());
  }
};

TEST(ScalarTest, MatchesBignumOracle) {
  BnOracle oracle;
  SeededEntropy e(1);
  for (int i = 0; i < 200; ++i) {
    const Scalar a = Scalar::random(e);
    const Scalar b = Scalar::random(e);
    EXPECT_EQ((a + b).hex(), oracle.add(a, b));
    EXPECT_EQ((a - b).hex(), oracle.sub(a, b));
    EXPECT_EQ((a * b).hex(), oracle.mul(a, b));
  }
}

TEST(ScalarTest, RingAxioms) {
  SeededEntropy e(2);
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(e), b = Scalar::random(e), c = Scalar::random(e);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a + (-a), Scalar());
  }
}

TEST(ScalarTest, SmallIntegersAndNegatives) {
  EXPECT_EQ(Scalar::from_int(3) + Scalar::from_int(4), Scalar::from_int(7));
  EXPECT_EQ(Scalar::from_int(-5), -Scalar::from_int(5));
  EXPECT_TRUE(Scalar::from_int(0).is_zero());
}

TEST(ScalarTest, RejectsNonCanonicalBytes) {
  std::array<std::uint8_t, 32> all_ff;
  all_ff.fill(0xff);
  EXPECT_THROW(Scalar::from_bytes(all_ff), Error);
  const Scalar s = Scalar::from_int(123456789);
  EXPECT_EQ(Scalar::from_hex(s.hex()), s);
}

// Published P-256 base point and its double, SEC 2 / NIST test data.
constexpr const char* kG =
    "036b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296";
constexpr const char* k2G =
    "037cf27b188d034f7e8a52380304b51ac3c08969e277f21b35a60b48fc47669978";

TEST(GroupElementTest, KnownEncodings) {
  EXPECT_EQ(GroupElement::generator().hex(), kG);
  EXPECT_EQ(mul_generator(2).hex(), k2G);
  EXPECT_EQ((GroupElement::generator() + GroupElement::generator()).hex(), k2G);
  EXPECT_EQ(GroupElement().hex(), "00");
  EXPECT_EQ(GroupElement::generator().encode().size(), kPointBytes);
}

TEST(GroupElementTest, ScalarMultiplicationByRepeatedAddition) {
  GroupElement acc;
  for (int k = 0; k <= 40; ++k) {
    EXPECT_EQ(mul_generator(k), acc) << k;
    EXPECT_EQ(mul_generator(-k), -acc) << k;
    acc += GroupElement::generator();
  }
}

TEST(GroupElementTest, EncodeDecodeRoundTrip) {
  SeededEntropy e(3);
  for (int i = 0; i < 50; ++i) {
    const auto p = mul_generator(Scalar::random(e));
    EXPECT_EQ(GroupElement::decode(p.encode()), p);
  }
  EXPECT_TRUE(GroupElement::from_hex("00").is_identity());
  EXPECT_THROW(GroupElement::from_hex("02ff"), Error);
  // Only the compressed form is accepted.
  EXPECT_THROW(GroupElement::from_hex(std::string("04") + std::string(128, '1')),
               Error);
}

TEST(GroupElementTest, MultiMulMatchesTermwise) {
  SeededEntropy e(4);
  std::vector<GroupElement> pts;
  std::vector<Scalar> ks;
  std::vector<std::int64_t> small;
  GroupElement expect_big, expect_small;
  Rng rng(4);
  for (int i = 0; i < 12; ++i) {
    pts.push_back(mul_generator(Scalar::random(e)));
    ks.push_back(i == 5 ? Scalar() : Scalar::random(e));
    small.push_back(rng.uniform_int(-1000, 1000));
    expect_big += pts.back() * ks.back();
    expect_small += pts.back() * small.back();
  }
  EXPECT_EQ(multi_mul(pts, ks), expect_big);
  EXPECT_EQ(multi_mul(pts, small), expect_small);
  const Scalar g = Scalar::random(e);
  EXPECT_EQ(multi_mul(pts, ks, g), expect_big + mul_generator(g));
  EXPECT_THROW(multi_mul(pts, std::span<const Scalar>(ks).first(3)), Error);
}

TEST(HashToGroupTest, DeterministicAndDistinct) {
  const auto a = hash_to_group_pair("slot-1");
  const auto b = hash_to_group_pair("slot-1");
  const auto c = hash_to_group_pair("slot-2");
  EXPECT_EQ(a, b);
  EXPECT_NE(a.u0, c.u0);
  EXPECT_NE(a.u1, c.u1);
  EXPECT_NE(a.u0, a.u1);
  EXPECT_FALSE(a.u0.is_identity());
  EXPECT_THROW(hash_to_group_pair(""), Error);
}

TEST(HashToGroupTest, PureOverManyCalls) {
  std::set<std::string> encodings;
  for (int i = 0; i < 1000; ++i) {
    const auto p = hash_to_group_pair("epoch|7");
    encodings.insert(p.u0.hex() + p.u1.hex());
  }
  EXPECT_EQ(encodings.size(), 1u);
}

TEST(HashToGroupTest, InnerIsScalarWeightedSum) {
  const auto pair = hash_to_group_pair("epoch|1");
  const std::array<Scalar, 2> s{Scalar::from_int(3), Scalar::from_int(-2)};
  EXPECT_EQ(inner(s, pair), pair.u0 * 3 + pair.u1 * (-2));
}

}  // namespace
}  // namespace etdfe::group
