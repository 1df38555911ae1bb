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

#define OPENSSL_SUPPRESS_DEPRECATED
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/obj_mac.h>

#include <algorithm>
#include <cstring>
#include <string>

#include "curve.hpp"
#include "etdfe/error.hpp"
#include "etdfe/group.hpp"

namespace etdfe::group {
namespace detail {

Bn new_bn() {
  Bn bn(BN_new());
  if (!bn) crypto_fail("BN_new");
  return bn;
}

void crypto_fail(const char* what) {
  ERR_clear_error();
  fail(ErrorCode::kCryptoError, what);
}

namespace {

Curve make_curve() {
  Curve c;
  c.fast = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
  if (c.fast == nullptr) crypto_fail("P-256 unavailable");
  BN_CTX* ctx = BN_CTX_new();
  BIGNUM* p = BN_new();
  BIGNUM* a = BN_new();
  BIGNUM* b = BN_new();
  if (EC_GROUP_get_curve(c.fast, p, a, b, ctx) != 1) crypto_fail("get_curve");
  c.generic = EC_GROUP_new_curve_GFp(p, a, b, ctx);
  if (c.generic == nullptr) crypto_fail("generic curve");
  EC_POINT* g = EC_POINT_new(c.generic);
  BIGNUM* gx = BN_new();
  BIGNUM* gy = BN_new();
  if (EC_POINT_get_affine_coordinates(c.fast, EC_GROUP_get0_generator(c.fast),
                                      gx, gy, ctx) != 1 ||
      EC_POINT_set_affine_coordinates(c.generic, g, gx, gy, ctx) != 1 ||
      EC_GROUP_set_generator(c.generic, g, EC_GROUP_get0_order(c.fast),
                             BN_value_one()) != 1) {
    crypto_fail("generic generator");
  }
  c.order = BN_dup(EC_GROUP_get0_order(c.fast));
  c.field = p;
  EC_POINT_free(g);
  BN_free(gx);
  BN_free(gy);
  BN_free(a);
  BN_free(b);
  BN_CTX_free(ctx);
  return c;
}

struct CtxHolder {
  BN_CTX* ctx = BN_CTX_new();
  ~CtxHolder() { BN_CTX_free(ctx); }
};

}  // namespace

const Curve& curve() {
  static const Curve c = make_curve();
  return c;
}

BN_CTX* bn_ctx() {
  thread_local CtxHolder holder;
  if (holder.ctx == nullptr) crypto_fail("BN_CTX_new");
  return holder.ctx;
}

Bn scalar_to_bn(const Scalar& s) {
  Bn bn(BN_lebin2bn(s.bytes().data(), kScalarBytes, nullptr));
  if (!bn) crypto_fail("BN_lebin2bn");
  return bn;
}

Scalar bn_to_scalar(const BIGNUM* bn) {
  Bn r = new_bn();
  if (BN_nnmod(r.get(), bn, curve().order, bn_ctx()) != 1) {
    crypto_fail("BN_nnmod");
  }
  std::array<std::uint8_t, kScalarBytes> le{};
  if (BN_bn2lebinpad(r.get(), le.data(), kScalarBytes) != kScalarBytes) {
    crypto_fail("BN_bn2lebinpad");
  }
  return Scalar::from_bytes(le);
}

Bn int_to_bn_mod_q(std::int64_t value) {
  Bn bn = new_bn();
  const std::uint64_t mag = value < 0 ? 0 - static_cast<std::uint64_t>(value)
                                      : static_cast<std::uint64_t>(value);
  if (BN_set_word(bn.get(), mag) != 1) crypto_fail("BN_set_word");
  if (value < 0 && BN_sub(bn.get(), curve().order, bn.get()) != 1) {
    crypto_fail("BN_sub");
  }
  return bn;
}

}  // namespace detail

using detail::bn_ctx;
using detail::Bn;
using detail::crypto_fail;
using detail::curve;

// --- hex -------------------------------------------------------------------

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    fail(ErrorCode::kFormatError, "invalid hex digit");
  };
  if (hex.size() % 2 != 0) fail(ErrorCode::kFormatError, "odd-length hex");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 |
                                       nibble(hex[2 * i + 1]));
  }
  return out;
}

// --- Scalar ----------------------------------------------------------------

Scalar Scalar::from_int(std::int64_t value) {
  Bn bn = detail::int_to_bn_mod_q(value);
  return detail::bn_to_scalar(bn.get());
}

Scalar Scalar::random(EntropySource& entropy) {
  // 64 bytes reduced mod q: bias below 2^-256.
  std::array<std::uint8_t, 64> wide{};
  entropy.fill(wide);
  Bn bn(BN_bin2bn(wide.data(), wide.size(), nullptr));
  if (!bn) crypto_fail("BN_bin2bn");
  OPENSSL_cleanse(wide.data(), wide.size());
  return detail::bn_to_scalar(bn.get());
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> le_bytes) {
  if (le_bytes.size() != kScalarBytes) {
    fail(ErrorCode::kFormatError, "scalar must be 32 bytes");
  }
  Scalar s;
  std::copy(le_bytes.begin(), le_bytes.end(), s.le_.begin());
  Bn bn = detail::scalar_to_bn(s);
  if (BN_cmp(bn.get(), curve().order) >= 0) {
    fail(ErrorCode::kFormatError, "scalar not reduced mod q");
  }
  return s;
}

Scalar Scalar::from_hex(std::string_view hex) {
  return from_bytes(group::from_hex(hex));
}

std::string Scalar::hex() const { return to_hex(le_); }

bool Scalar::is_zero() const {
  return std::all_of(le_.begin(), le_.end(), [](auto b) { return b == 0; });
}

namespace {

enum class Op { kAdd, kSub, kMul };

Scalar scalar_op(const Scalar& a, const Scalar& b, Op op) {
  Bn x = detail::scalar_to_bn(a);
  Bn y = detail::scalar_to_bn(b);
  Bn r = detail::new_bn();
  int ok = 0;
  switch (op) {
    case Op::kAdd:
      ok = BN_mod_add(r.get(), x.get(), y.get(), curve().order, bn_ctx());
      break;
    case Op::kSub:
      ok = BN_mod_sub(r.get(), x.get(), y.get(), curve().order, bn_ctx());
      break;
    case Op::kMul:
      ok = BN_mod_mul(r.get(), x.get(), y.get(), curve().order, bn_ctx());
      break;
  }
  if (ok != 1) crypto_fail("scalar arithmetic");
  return detail::bn_to_scalar(r.get());
}

}  // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
  return scalar_op(a, b, Op::kAdd);
}
Scalar operator-(const Scalar& a, const Scalar& b) {
  return scalar_op(a, b, Op::kSub);
}
Scalar operator*(const Scalar& a, const Scalar& b) {
  return scalar_op(a, b, Op::kMul);
}
Scalar Scalar::operator-() const { return Scalar() - *this; }

// --- GroupElement ----------------------------------------------------------

GroupElement::GroupElement() : point_(EC_POINT_new(curve().fast)) {
  if (point_ == nullptr || EC_POINT_set_to_infinity(curve().fast, point_) != 1) {
    crypto_fail("EC_POINT_new");
  }
}

GroupElement::GroupElement(const GroupElement& other)
    : point_(EC_POINT_dup(other.point_, curve().fast)) {
  if (point_ == nullptr) crypto_fail("EC_POINT_dup");
}

GroupElement::GroupElement(GroupElement&& other) noexcept
    : point_(other.point_) {
  other.point_ = nullptr;
}

GroupElement& GroupElement::operator=(const GroupElement& other) {
  if (this != &other) {
    if (point_ == nullptr) point_ = EC_POINT_new(curve().fast);
    if (point_ == nullptr || EC_POINT_copy(point_, other.point_) != 1) {
      crypto_fail("EC_POINT_copy");
    }
  }
  return *this;
}

GroupElement& GroupElement::operator=(GroupElement&& other) noexcept {
  std::swap(point_, other.point_);
  return *this;
}

GroupElement::~GroupElement() { EC_POINT_free(point_); }

const GroupElement& GroupElement::generator() {
  static const GroupElement g = [] {
    GroupElement e;
    if (EC_POINT_copy(e.point_, EC_GROUP_get0_generator(curve().fast)) != 1) {
      crypto_fail("generator");
    }
    return e;
  }();
  return g;
}

std::vector<std::uint8_t> GroupElement::encode() const {
  if (is_identity()) return {0x00};
  std::vector<std::uint8_t> out(kPointBytes);
  if (EC_POINT_point2oct(curve().fast, point_, POINT_CONVERSION_COMPRESSED,
                         out.data(), out.size(), bn_ctx()) != kPointBytes) {
    crypto_fail("EC_POINT_point2oct");
  }
  return out;
}

GroupElement GroupElement::decode(std::span<const std::uint8_t> bytes) {
  GroupElement e;
  if (bytes.size() == 1 && bytes[0] == 0x00) return e;
  if (bytes.size() != kPointBytes || (bytes[0] != 0x02 && bytes[0] != 0x03)) {
    fail(ErrorCode::kFormatError, "point must be a 33-byte compressed encoding");
  }
  if (EC_POINT_oct2point(curve().fast, e.point_, bytes.data(), bytes.size(),
                         bn_ctx()) != 1) {
    ERR_clear_error();
    fail(ErrorCode::kFormatError, "point not on curve");
  }
  return e;
}

std::string GroupElement::hex() const { return to_hex(encode()); }

GroupElement GroupElement::from_hex(std::string_view hex) {
  return decode(group::from_hex(hex));
}

bool GroupElement::is_identity() const {
  return EC_POINT_is_at_infinity(curve().fast, point_) == 1;
}

GroupElement GroupElement::operator+(const GroupElement& other) const {
  GroupElement r(*this);
  r += other;
  return r;
}

GroupElement GroupElement::operator-(const GroupElement& other) const {
  GroupElement r(*this);
  r -= other;
  return r;
}

GroupElement GroupElement::operator-() const {
  GroupElement r(*this);
  if (EC_POINT_invert(curve().fast, r.point_, bn_ctx()) != 1) {
    crypto_fail("EC_POINT_invert");
  }
  return r;
}

GroupElement& GroupElement::operator+=(const GroupElement& other) {
  if (EC_POINT_add(curve().fast, point_, point_, other.point_, bn_ctx()) != 1) {
    crypto_fail("EC_POINT_add");
  }
  return *this;
}

GroupElement& GroupElement::operator-=(const GroupElement& other) {
  return *this += -other;
}

GroupElement GroupElement::operator*(const Scalar& k) const {
  Bn bn = detail::scalar_to_bn(k);
  GroupElement r;
  if (EC_POINT_mul(curve().fast, r.point_, nullptr, point_, bn.get(),
                   bn_ctx()) != 1) {
    crypto_fail("EC_POINT_mul");
  }
  return r;
}

GroupElement GroupElement::operator*(std::int64_t k) const {
  Bn bn = detail::int_to_bn_mod_q(k);
  GroupElement r;
  if (EC_POINT_mul(curve().fast, r.point_, nullptr, point_, bn.get(),
                   bn_ctx()) != 1) {
    crypto_fail("EC_POINT_mul");
  }
  return r;
}

bool operator==(const GroupElement& a, const GroupElement& b) {
  const int cmp = EC_POINT_cmp(curve().fast, a.point_, b.point_, bn_ctx());
  if (cmp < 0) crypto_fail("EC_POINT_cmp");
  return cmp == 0;
}

GroupElement mul_generator(const Scalar& k) {
  Bn bn = detail::scalar_to_bn(k);
  GroupElement r;
  if (EC_POINT_mul(curve().fast, r.raw(), bn.get(), nullptr, nullptr,
                   bn_ctx()) != 1) {
    crypto_fail("EC_POINT_mul");
  }
  return r;
}

GroupElement mul_generator(std::int64_t k) {
  Bn bn = detail::int_to_bn_mod_q(k);
  GroupElement r;
  if (EC_POINT_mul(curve().fast, r.raw(), bn.get(), nullptr, nullptr,
                   bn_ctx()) != 1) {
    crypto_fail("EC_POINT_mul");
  }
  return r;
}

namespace {

GroupElement multi_mul_bn(std::span<const GroupElement> points,
                          const std::vector<Bn>& scalars, const BIGNUM* g) {
  std::vector<const EC_POINT*> pts;
  std::vector<const BIGNUM*> ks;
  pts.reserve(points.size());
  ks.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (BN_is_zero(scalars[i].get())) continue;
    pts.push_back(points[i].raw());
    ks.push_back(scalars[i].get());
  }
  GroupElement r;
  if (pts.empty() && g == nullptr) return r;
  if (EC_POINTs_mul(curve().fast, r.raw(), g, pts.size(), pts.data(),
                    ks.data(), bn_ctx()) != 1) {
    crypto_fail("EC_POINTs_mul");
  }
  return r;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    fail(ErrorCode::kShapeMismatch, "multi_mul: " + std::to_string(a) +
                                        " points vs " + std::to_string(b) +
                                        " scalars");
  }
}

}  // namespace

GroupElement multi_mul(std::span<const GroupElement> points,
                       std::span<const Scalar> scalars) {
  check_lengths(points.size(), scalars.size());
  std::vector<Bn> ks;
  ks.reserve(scalars.size());
  for (const Scalar& s : scalars) ks.push_back(detail::scalar_to_bn(s));
  return multi_mul_bn(points, ks, nullptr);
}

GroupElement multi_mul(std::span<const GroupElement> points,
                       std::span<const std::int64_t> scalars) {
  check_lengths(points.size(), scalars.size());
  std::vector<Bn> ks;
  ks.reserve(scalars.size());
  for (std::int64_t s : scalars) ks.push_back(detail::int_to_bn_mod_q(s));
  return multi_mul_bn(points, ks, nullptr);
}

GroupElement multi_mul(std::span<const GroupElement> points,
                       std::span<const Scalar> scalars, const Scalar& g) {
  check_lengths(points.size(), scalars.size());
  std::vector<Bn> ks;
  ks.reserve(scalars.size());
  for (const Scalar& s : scalars) ks.push_back(detail::scalar_to_bn(s));
  Bn gb = detail::scalar_to_bn(g);
  return multi_mul_bn(points, ks, gb.get());
}

// --- hashing ---------------------------------------------------------------

namespace {

GroupElement hash_to_point(std::string_view tag,
                           std::span<const std::uint8_t> label) {
  const detail::Curve& c = detail::curve();
  Bn x = detail::new_bn();
  GroupElement out;
  std::vector<std::uint8_t> input;
  input.reserve(tag.size() + 1 + label.size() + 4);
  for (std::uint32_t counter = 0;; ++counter) {
    input.assign(tag.begin(), tag.end());
    input.push_back(0x00);
    input.insert(input.end(), label.begin(), label.end());
    for (int i = 3; i >= 0; --i) {
      input.push_back(static_cast<std::uint8_t>(counter >> (8 * i)));
    }
    std::uint8_t digest[64];
    unsigned int len = 0;
    if (EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha512(),
                   nullptr) != 1) {
      crypto_fail("SHA-512");
    }
    if (BN_bin2bn(digest, 32, x.get()) == nullptr) detail::crypto_fail("BN_bin2bn");
    if (BN_cmp(x.get(), c.field) >= 0) continue;
    const int y_bit = digest[32] & 1;
    if (EC_POINT_set_compressed_coordinates(c.fast, out.raw(), x.get(), y_bit,
                                            detail::bn_ctx()) == 1) {
      return out;
    }
    ERR_clear_error();
  }
}

}  // namespace

GroupPair hash_to_group_pair(std::span<const std::uint8_t> label) {
  if (label.empty()) {
    fail(ErrorCode::kInvalidArgument, "hash_to_group_pair: empty label");
  }
  return GroupPair{hash_to_point("ETDFE-U0", label),
                   hash_to_point("ETDFE-U1", label)};
}

GroupPair hash_to_group_pair(std::string_view label) {
  return hash_to_group_pair(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(label.data()), label.size()));
}

GroupElement inner(const std::array<Scalar, 2>& s, const GroupPair& pair) {
  const GroupElement pts[2] = {pair.u0, pair.u1};
  return multi_mul(pts, s);
}

}  // namespace etdfe::group
