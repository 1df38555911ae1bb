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

#pragma once

// Prime-order group used by the functional-encryption scheme. Backed by the
// NIST P-256 curve through OpenSSL; the rest of the library only sees Scalar
// and GroupElement values.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etdfe/random.hpp"

struct ec_point_st;

namespace etdfe::group {

inline constexpr std::size_t kScalarBytes = 32;
inline constexpr std::size_t kPointBytes = 33;

// Element of Z_q, stored as 32 little-endian bytes, always reduced.
class Scalar {
 public:
  Scalar() = default;

  static Scalar from_int(std::int64_t value);
  static Scalar random(EntropySource& entropy);
  // Rejects non-canonical encodings (value >= q).
  static Scalar from_bytes(std::span<const std::uint8_t> le_bytes);
  static Scalar from_hex(std::string_view hex);

  const std::array<std::uint8_t, kScalarBytes>& bytes() const { return le_; }
  std::string hex() const;
  bool is_zero() const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& other) { return *this = *this + other; }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  std::array<std::uint8_t, kScalarBytes> le_{};
};

// Point of the group; default-constructed value is the identity.
class GroupElement {
 public:
  GroupElement();
  GroupElement(const GroupElement& other);
  GroupElement(GroupElement&& other) noexcept;
  GroupElement& operator=(const GroupElement& other);
  GroupElement& operator=(GroupElement&& other) noexcept;
  ~GroupElement();

  static GroupElement identity() { return GroupElement(); }
  static const GroupElement& generator();

  // Canonical compressed SEC1 encoding: 33 bytes, or the single byte 0x00 for
  // the identity.
  std::vector<std::uint8_t> encode() const;
  static GroupElement decode(std::span<const std::uint8_t> bytes);
  std::string hex() const;
  static GroupElement from_hex(std::string_view hex);

  bool is_identity() const;

  GroupElement operator+(const GroupElement& other) const;
  GroupElement operator-(const GroupElement& other) const;
  GroupElement operator-() const;
  GroupElement& operator+=(const GroupElement& other);
  GroupElement& operator-=(const GroupElement& other);

  GroupElement operator*(const Scalar& k) const;
  GroupElement operator*(std::int64_t k) const;

  friend bool operator==(const GroupElement& a, const GroupElement& b);

  const ec_point_st* raw() const { return point_; }
  ec_point_st* raw() { return point_; }

 private:
  ec_point_st* point_;
};

// k·P for the fixed generator P.
GroupElement mul_generator(const Scalar& k);
GroupElement mul_generator(std::int64_t k);

// sum_i k_i·points_i (+ g·P when `g` is given).
GroupElement multi_mul(std::span<const GroupElement> points,
                       std::span<const Scalar> scalars);
GroupElement multi_mul(std::span<const GroupElement> points,
                       std::span<const std::int64_t> scalars);
GroupElement multi_mul(std::span<const GroupElement> points,
                       std::span<const Scalar> scalars, const Scalar& g);

struct GroupPair {
  GroupElement u0;
  GroupElement u1;

  friend bool operator==(const GroupPair&, const GroupPair&) = default;
};

// H: {0,1}* -> G^2. Two domain-separated try-and-increment maps (tags
// "ETDFE-U0" and "ETDFE-U1"). Empty labels are rejected.
GroupPair hash_to_group_pair(std::span<const std::uint8_t> label);
GroupPair hash_to_group_pair(std::string_view label);

// s[0]·pair.u0 + s[1]·pair.u1
GroupElement inner(const std::array<Scalar, 2>& s, const GroupPair& pair);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace etdfe::group
