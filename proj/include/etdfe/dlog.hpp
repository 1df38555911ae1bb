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

// Bounded signed discrete logarithm: recovers x from x·P when |x| is small.
// A sorted lookup table covers |x| <= bound; beyond that a baby-step /
// giant-step walk (giant step 2·bound+1) extends the search to |x| <= reach.

#include <cstdint>
#include <optional>
#include <vector>

#include "etdfe/group.hpp"

namespace etdfe::group {

inline constexpr std::uint64_t kDefaultTableCeiling = std::uint64_t{1} << 26;

class DlogTable {
 public:
  // Throws BoundTooLarge when bound > ceiling, InvalidArgument when bound == 0
  // or reach < bound. reach == 0 means reach = bound.
  static DlogTable build(std::uint64_t bound, std::uint64_t reach = 0,
                         std::uint64_t ceiling = kDefaultTableCeiling);

  std::uint64_t bound() const { return bound_; }
  std::uint64_t reach() const { return reach_; }

  // Logical entry count, one per x in [-bound, bound].
  std::uint64_t size() const { return 2 * bound_ + 1; }

  // Table-only lookup; no giant steps.
  std::optional<std::int64_t> lookup(const GroupElement& target) const;

  // Table lookup, then giant steps out to `reach`. Throws OutOfRange.
  std::int64_t solve(const GroupElement& target) const;

 private:
  struct Entry {
    std::uint64_t key;   // first 8 bytes of the x-coordinate, big-endian
    std::uint32_t mag;   // |x|, 1..bound
    std::uint32_t odd;   // y-parity of +mag·P
    bool operator<(const Entry& o) const { return key < o.key; }
  };

  std::optional<std::int64_t> lookup_encoded(
      const std::vector<std::uint8_t>& enc, const GroupElement& target) const;

  std::uint64_t bound_ = 0;
  std::uint64_t reach_ = 0;
  std::vector<Entry> entries_;
  GroupElement giant_;  // (2·bound+1)·P
};

DlogTable dlog_build_table(std::uint64_t bound,
                           std::uint64_t ceiling = kDefaultTableCeiling);

std::int64_t dlog_solve(const GroupElement& target, const DlogTable& table);

}  // namespace etdfe::group
