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

#include "etdfe/fe.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <string>

#include "etdfe/error.hpp"

namespace etdfe::fe {
namespace {

// s . H(l) for every slot.
std::vector<GroupElement> masks(const MeterSecretKey& key,
                                std::span<const SlotLabel> slots) {
  std::vector<GroupElement> out;
  out.reserve(slots.size());
  for (const SlotLabel& slot : slots) {
    out.push_back(group::inner(key.s, group::hash_to_group_pair(slot.bytes())));
  }
  return out;
}

void check_period(std::span<const Ciphertext> cts, MeterId meter,
                  const std::vector<SlotLabel>& slots) {
  if (cts.size() != slots.size()) {
    fail(ErrorCode::kShapeMismatch,
         "expected " + std::to_string(slots.size()) + " ciphertexts, got " +
             std::to_string(cts.size()));
  }
  for (std::size_t t = 0; t < cts.size(); ++t) {
    if (cts[t].meter_id != meter) {
      fail(ErrorCode::kShapeMismatch,
           "ciphertext " + std::to_string(t) + " belongs to meter " +
               std::to_string(cts[t].meter_id));
    }
    if (cts[t].slot != slots[t]) {
      fail(ErrorCode::kShapeMismatch,
           "ciphertext " + std::to_string(t) + " is for slot " +
               cts[t].slot.bytes() + ", key expects " + slots[t].bytes());
    }
  }
}

std::vector<GroupElement> points_of(std::span<const Ciphertext> cts) {
  std::vector<GroupElement> pts;
  pts.reserve(cts.size());
  for (const Ciphertext& ct : cts) pts.push_back(ct.c);
  return pts;
}

}  // namespace

std::string SlotLabel::bytes() const {
  return epoch + "|" + std::to_string(index);
}

SlotLabel SlotLabel::parse(std::string_view text) {
  const auto bar = text.rfind('|');
  if (bar == std::string_view::npos) {
    fail(ErrorCode::kFormatError, "slot label missing '|'");
  }
  SlotLabel out;
  out.epoch = std::string(text.substr(0, bar));
  const auto digits = text.substr(bar + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                   out.index);
  if (ec != std::errc() || ptr != digits.data() + digits.size() ||
      out.index < 1 || out.epoch.find('|') != std::string::npos) {
    fail(ErrorCode::kFormatError, "bad slot label: " + std::string(text));
  }
  return out;
}

std::vector<MeterSecretKey> keygen(std::size_t num_meters,
                                   EntropySource& entropy) {
  if (num_meters < 2) {
    fail(ErrorCode::kTooFewMeters,
         "at least two meters are required; aggregating one meter reveals its "
         "reading");
  }
  std::vector<MeterSecretKey> keys;
  keys.reserve(num_meters);
  for (std::size_t i = 0; i < num_meters; ++i) {
    keys.push_back(MeterSecretKey{static_cast<MeterId>(i + 1),
                                  {Scalar::random(entropy),
                                   Scalar::random(entropy)}});
  }
  return keys;
}

MonitoringKey derive_monitoring_key(std::span<const MeterSecretKey> keys) {
  if (keys.empty()) fail(ErrorCode::kEmptyFleet, "no meter keys");
  MonitoringKey mk;
  std::set<MeterId> roster;
  for (const MeterSecretKey& k : keys) {
    if (!roster.insert(k.meter_id).second) {
      fail(ErrorCode::kInvalidArgument,
           "duplicate meter id " + std::to_string(k.meter_id));
    }
    mk.dk[0] += k.s[0];
    mk.dk[1] += k.s[1];
  }
  mk.meter_ids.assign(roster.begin(), roster.end());
  return mk;
}

BillingKey derive_billing_key(const MeterSecretKey& key,
                              std::span<const std::int64_t> rates,
                              std::span<const SlotLabel> slots) {
  if (rates.size() != slots.size() || slots.empty()) {
    fail(ErrorCode::kShapeMismatch,
         "billing needs |rates| == |slots| >= 1 (got " +
             std::to_string(rates.size()) + " and " +
             std::to_string(slots.size()) + ")");
  }
  BillingKey bk;
  bk.meter_id = key.meter_id;
  bk.period_slots.assign(slots.begin(), slots.end());
  bk.rates.assign(rates.begin(), rates.end());
  bk.dk = group::multi_mul(masks(key, slots), rates);
  return bk;
}

DetectionKeySet derive_detection_keys(const MeterSecretKey& key,
                                      const quantize::IntMatrix& w,
                                      std::span<const SlotLabel> slots) {
  if (w.rows != slots.size()) {
    fail(ErrorCode::kShapeMismatch,
         "weight matrix has " + std::to_string(w.rows) + " rows but " +
             std::to_string(slots.size()) + " slots were given");
  }
  if (w.cols == 0) fail(ErrorCode::kShapeMismatch, "weight matrix has no columns");
  if (w.cols >= w.rows) {
    fail(ErrorCode::kPrivacyViolation,
         "first hidden layer must be narrower than the input (n=" +
             std::to_string(w.cols) + ", d=" + std::to_string(w.rows) +
             "); n >= d lets the operator solve for individual readings");
  }
  DetectionKeySet dks;
  dks.meter_id = key.meter_id;
  dks.period_slots.assign(slots.begin(), slots.end());
  dks.weight_digest = w.digest();
  const std::vector<GroupElement> m = masks(key, slots);
  dks.keys.reserve(w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    dks.keys.push_back(group::multi_mul(m, w.column(j)));
  }
  return dks;
}

Ciphertext encrypt(const MeterSecretKey& key, const SlotLabel& slot,
                   std::int64_t reading, std::int64_t reading_max) {
  return encrypt(key, slot, group::hash_to_group_pair(slot.bytes()), reading,
                 reading_max);
}

Ciphertext encrypt(const MeterSecretKey& key, const SlotLabel& slot,
                   const group::GroupPair& basis, std::int64_t reading,
                   std::int64_t reading_max) {
  if (reading < 0 || reading > reading_max) {
    fail(ErrorCode::kReadingOutOfRange,
         "reading " + std::to_string(reading) + " outside [0, " +
             std::to_string(reading_max) + "]");
  }
  const GroupElement pts[2] = {basis.u0, basis.u1};
  Ciphertext ct;
  ct.c = group::multi_mul(pts, key.s, Scalar::from_int(reading));
  ct.meter_id = key.meter_id;
  ct.slot = slot;
  return ct;
}

GroupElement aggregate_point(std::span<const Ciphertext> cts,
                             const MonitoringKey& mk) {
  if (cts.empty()) fail(ErrorCode::kIncompleteSlot, "no ciphertexts");
  GroupElement sum;
  for (const Ciphertext& ct : cts) sum += ct.c;
  const auto basis = group::hash_to_group_pair(cts.front().slot.bytes());
  return sum - group::inner(mk.dk, basis);
}

std::int64_t aggregate_decrypt(std::span<const Ciphertext> cts,
                               const MonitoringKey& mk,
                               const group::DlogTable& table) {
  if (cts.size() != mk.meter_ids.size()) {
    fail(ErrorCode::kIncompleteSlot,
         "got " + std::to_string(cts.size()) + " ciphertexts for " +
             std::to_string(mk.meter_ids.size()) + " enrolled meters");
  }
  std::vector<MeterId> seen;
  seen.reserve(cts.size());
  for (const Ciphertext& ct : cts) {
    if (ct.slot != cts.front().slot) {
      fail(ErrorCode::kIncompleteSlot, "ciphertexts span more than one slot");
    }
    seen.push_back(ct.meter_id);
  }
  std::sort(seen.begin(), seen.end());
  if (seen != mk.meter_ids) {
    fail(ErrorCode::kIncompleteSlot,
         "ciphertext set does not match the enrolment roster (missing or "
         "duplicate meter)");
  }
  return table.solve(aggregate_point(cts, mk));
}

std::int64_t billing_decrypt(std::span<const Ciphertext> cts,
                             const BillingKey& bk,
                             const group::DlogTable& table) {
  check_period(cts, bk.meter_id, bk.period_slots);
  const GroupElement weighted = group::multi_mul(points_of(cts), bk.rates);
  return table.solve(weighted - bk.dk);
}

std::vector<std::int64_t> detection_decrypt(std::span<const Ciphertext> cts,
                                            const DetectionKeySet& dks,
                                            const quantize::IntMatrix& w,
                                            const group::DlogTable& table) {
  if (w.digest() != dks.weight_digest) {
    fail(ErrorCode::kKeyModelMismatch,
         "weight matrix differs from the one the detection keys were derived "
         "for");
  }
  check_period(cts, dks.meter_id, dks.period_slots);
  if (w.rows != cts.size() || w.cols != dks.keys.size()) {
    fail(ErrorCode::kShapeMismatch, "weight matrix shape does not match keys");
  }
  const std::vector<GroupElement> pts = points_of(cts);
  std::vector<std::int64_t> out;
  out.reserve(w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    const GroupElement combined = group::multi_mul(pts, w.column(j));
    out.push_back(table.solve(combined - dks.keys[j]));
  }
  return out;
}

}  // namespace etdfe::fe
