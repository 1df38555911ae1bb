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
#include "etdfe/dlog.hpp"

#include <algorithm>
#include <string>

#include "curve.hpp"
#include "etdfe/error.hpp"

namespace etdfe::group {
namespace {

constexpr std::size_t kBatch = 4096;

std::uint64_t key_of(const std::uint8_t* enc) {
  std::uint64_t k = 0;
  for (int i = 1; i <= 8; ++i) k = (k << 8) | enc[i];
  return k;
}

}  // namespace

DlogTable DlogTable::build(std::uint64_t bound, std::uint64_t reach,
                           std::uint64_t ceiling) {
  if (bound == 0) fail(ErrorCode::kInvalidArgument, "dlog table bound must be >= 1");
  if (bound > ceiling) {
    fail(ErrorCode::kBoundTooLarge,
         "dlog table bound " + std::to_string(bound) + " exceeds ceiling " +
             std::to_string(ceiling));
  }
  if (bound > 0xffffffffULL) {
    fail(ErrorCode::kBoundTooLarge, "dlog table bound exceeds 2^32-1");
  }
  if (reach == 0) reach = bound;
  if (reach < bound) fail(ErrorCode::kInvalidArgument, "reach < bound");
  if (reach > (std::uint64_t{1} << 62)) {
    fail(ErrorCode::kBoundTooLarge, "dlog reach too large");
  }

  DlogTable t;
  t.bound_ = bound;
  t.reach_ = reach;
  t.entries_.reserve(bound);

  const detail::Curve& c = detail::curve();
  BN_CTX* ctx = detail::bn_ctx();
  const EC_POINT* gen = EC_GROUP_get0_generator(c.generic);

  std::vector<EC_POINT*> batch(std::min<std::uint64_t>(kBatch, bound));
  for (auto& p : batch) {
    p = EC_POINT_new(c.generic);
    if (p == nullptr) detail::crypto_fail("EC_POINT_new");
  }
  detail::Point cur(EC_POINT_new(c.generic));
  EC_POINT_set_to_infinity(c.generic, cur.get());

  std::uint8_t enc[kPointBytes];
  std::uint64_t next = 1;
  while (next <= bound) {
    const std::size_t n = std::min<std::uint64_t>(batch.size(), bound - next + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (EC_POINT_add(c.generic, batch[i], cur.get(), gen, ctx) != 1 ||
          EC_POINT_copy(cur.get(), batch[i]) != 1) {
        detail::crypto_fail("table add");
      }
    }
    if (EC_POINTs_make_affine(c.generic, n, batch.data(), ctx) != 1) {
      detail::crypto_fail("EC_POINTs_make_affine");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (EC_POINT_point2oct(c.generic, batch[i], POINT_CONVERSION_COMPRESSED,
                             enc, sizeof(enc), ctx) != kPointBytes) {
        detail::crypto_fail("table encode");
      }
      t.entries_.push_back(Entry{key_of(enc),
                                 static_cast<std::uint32_t>(next + i),
                                 static_cast<std::uint32_t>(enc[0] == 0x03)});
    }
    next += n;
  }
  for (auto* p : batch) EC_POINT_free(p);

  std::sort(t.entries_.begin(), t.entries_.end());
  t.giant_ = mul_generator(static_cast<std::int64_t>(2 * bound + 1));
  return t;
}

std::optional<std::int64_t> DlogTable::lookup_encoded(
    const std::vector<std::uint8_t>& enc, const GroupElement& target) const {
  if (enc.size() == 1) return 0;  // identity
  const Entry probe{key_of(enc.data()), 0, 0};
  auto [lo, hi] = std::equal_range(entries_.begin(), entries_.end(), probe);
  const std::uint32_t odd = enc[0] == 0x03;
  for (auto it = lo; it != hi; ++it) {
    const std::int64_t x =
        it->odd == odd ? std::int64_t{it->mag} : -std::int64_t{it->mag};
    // The key is a 64-bit prefix; confirm before answering.
    if (mul_generator(x) == target) return x;
  }
  return std::nullopt;
}

std::optional<std::int64_t> DlogTable::lookup(const GroupElement& target) const {
  return lookup_encoded(target.encode(), target);
}

std::int64_t DlogTable::solve(const GroupElement& target) const {
  if (auto x = lookup(target)) return *x;
  const std::uint64_t step = 2 * bound_ + 1;
  const std::uint64_t giants =
      reach_ > bound_ ? (reach_ - bound_ + step - 1) / step : 0;
  const auto within = [&](std::int64_t x) {
    return static_cast<std::uint64_t>(x < 0 ? -x : x) <= reach_;
  };
  GroupElement down = target;
  GroupElement up = target;
  for (std::uint64_t k = 1; k <= giants; ++k) {
    const auto offset = static_cast<std::int64_t>(k * step);
    down -= giant_;
    if (auto j = lookup(down); j && within(offset + *j)) return offset + *j;
    up += giant_;
    if (auto j = lookup(up); j && within(*j - offset)) return *j - offset;
  }
  fail(ErrorCode::kOutOfRange,
       "discrete log not within +/-" + std::to_string(reach_));
}

DlogTable dlog_build_table(std::uint64_t bound, std::uint64_t ceiling) {
  return DlogTable::build(bound, 0, ceiling);
}

std::int64_t dlog_solve(const GroupElement& target, const DlogTable& table) {
  return table.solve(target);
}

}  // namespace etdfe::group
