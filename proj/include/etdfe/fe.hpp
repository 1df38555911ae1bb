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

// Inner-product functional encryption over per-slot hashed masks.
//
// Each meter i holds s_i in Z_q^2. A reading r for slot label l encrypts to
// the single group element
//
//     C = s_i . H(l) + r·P,          H(l) = (U0, U1) in G^2.
//
// Functional keys cancel the masks of a fixed linear combination, leaving
// (sum of weighted readings)·P, which a bounded dlog turns back into an
// integer:
//   monitoring  dk_m = sum_i s_i                      (one slot, all meters)
//   billing     DK_b = sum_t y[t] (s_i . H(l_t))       (one meter, b slots)
//   detection   D_j  = sum_t W[t][j] (s_i . H(l_t))    (one meter, d slots)
//
// Masks repeat when a label is reused, so a (meter, label) pair must never be
// encrypted twice; this module is stateless and leaves that to the caller.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "etdfe/dlog.hpp"
#include "etdfe/group.hpp"
#include "etdfe/quantize.hpp"
#include "etdfe/random.hpp"

namespace etdfe::fe {

using group::GroupElement;
using group::Scalar;

using MeterId = std::uint32_t;

inline constexpr std::int64_t kDefaultReadingMax = 8192;

struct MeterSecretKey {
  MeterId meter_id = 0;
  std::array<Scalar, 2> s;

  friend bool operator==(const MeterSecretKey&, const MeterSecretKey&) = default;
};

// Public per-slot identifier. Serialises to "epoch|index"; the epoch may not
// contain '|'.
struct SlotLabel {
  std::string epoch;
  std::uint64_t index = 1;

  std::string bytes() const;
  static SlotLabel parse(std::string_view text);

  friend auto operator<=>(const SlotLabel&, const SlotLabel&) = default;
};

struct Ciphertext {
  GroupElement c;
  MeterId meter_id = 0;
  SlotLabel slot;
};

struct MonitoringKey {
  std::array<Scalar, 2> dk;
  std::vector<MeterId> meter_ids;  // enrolment roster, ascending
};

struct BillingKey {
  MeterId meter_id = 0;
  std::vector<SlotLabel> period_slots;
  std::vector<std::int64_t> rates;
  GroupElement dk;
};

struct DetectionKeySet {
  MeterId meter_id = 0;
  std::vector<SlotLabel> period_slots;
  std::array<std::uint8_t, 32> weight_digest{};
  std::vector<GroupElement> keys;  // one per column of W
};

// --- KDC side ---------------------------------------------------------------

// Ids 1..num_meters. Throws TooFewMeters below two meters.
std::vector<MeterSecretKey> keygen(std::size_t num_meters,
                                   EntropySource& entropy);

MonitoringKey derive_monitoring_key(std::span<const MeterSecretKey> keys);

BillingKey derive_billing_key(const MeterSecretKey& key,
                              std::span<const std::int64_t> rates,
                              std::span<const SlotLabel> slots);

// W is d x n with d = slots.size(); rejects n >= d with PrivacyViolation.
DetectionKeySet derive_detection_keys(const MeterSecretKey& key,
                                      const quantize::IntMatrix& w,
                                      std::span<const SlotLabel> slots);

// --- meter side -------------------------------------------------------------

Ciphertext encrypt(const MeterSecretKey& key, const SlotLabel& slot,
                   std::int64_t reading,
                   std::int64_t reading_max = kDefaultReadingMax);

// Same, with H(slot) precomputed by the caller.
Ciphertext encrypt(const MeterSecretKey& key, const SlotLabel& slot,
                   const group::GroupPair& basis, std::int64_t reading,
                   std::int64_t reading_max = kDefaultReadingMax);

// --- operator side ----------------------------------------------------------

// (sum_i r_i)·P for exactly one ciphertext per enrolled meter.
std::int64_t aggregate_decrypt(std::span<const Ciphertext> cts,
                               const MonitoringKey& mk,
                               const group::DlogTable& table);

// sum c_i - dk . H(l) with no roster checks. Exposed so tests can show that a
// partial aggregate does not decrypt to the partial sum.
GroupElement aggregate_point(std::span<const Ciphertext> cts,
                             const MonitoringKey& mk);

std::int64_t billing_decrypt(std::span<const Ciphertext> cts,
                             const BillingKey& bk,
                             const group::DlogTable& table);

std::vector<std::int64_t> detection_decrypt(std::span<const Ciphertext> cts,
                                            const DetectionKeySet& dks,
                                            const quantize::IntMatrix& w,
                                            const group::DlogTable& table);

}  // namespace etdfe::fe
