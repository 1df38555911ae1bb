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

// Consumption data: a synthetic residential load generator, CSV ingestion
// and export, class balancing and stratified splitting.
//
// CSV rows are `meter_id,day_index,label,attack_tag,r1..r48` with readings
// printed to four decimals. Rows of the form `meter_id,day_index,r1..r48`
// (raw meter exports) are also accepted and read as honest.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "etdfe/attacks.hpp"
#include "etdfe/random.hpp"

namespace etdfe::data {

using attacks::DailyRecord;

struct Bump {
  double center = 0.0;     // slot index, within [0, 47]
  double width = 1.0;      // slots
  double amplitude = 0.0;  // kWh
};

struct ConsumerProfile {
  std::uint32_t meter_id = 1;
  double base_load = 0.2;  // kWh per slot
  Bump morning;
  Bump evening;
  double noise_sigma = 0.0;  // kWh; truncated at +/-3 sigma
  std::uint64_t seed = 0;

  void validate() const;
};

// Draws a plausible two-peak residential profile.
ConsumerProfile random_profile(Rng& rng, std::uint32_t meter_id);

// Readings are clamped to [0, max_kwh].
std::vector<DailyRecord> gen_honest_days(const ConsumerProfile& profile,
                                         std::size_t num_days,
                                         double max_kwh = 81.92,
                                         std::size_t slots = attacks::kSlotsPerDay,
                                         std::uint32_t first_day = 0);

std::vector<DailyRecord> ingest_csv(std::istream& in,
                                    std::size_t slots = attacks::kSlotsPerDay);
std::vector<DailyRecord> ingest_csv(const std::filesystem::path& path,
                                    std::size_t slots = attacks::kSlotsPerDay);

void export_csv(std::ostream& out, const std::vector<DailyRecord>& records);
void export_csv(const std::filesystem::path& path,
                const std::vector<DailyRecord>& records);

// Duplicates minority-class records (cycling in input order) until both
// classes have the same count. Throws DegenerateDataset on a single class.
std::vector<DailyRecord> balance(const std::vector<DailyRecord>& records);

// Stratified by label; `train_ratio` in (0, 1).
std::pair<std::vector<DailyRecord>, std::vector<DailyRecord>> split(
    const std::vector<DailyRecord>& records, double train_ratio,
    std::uint64_t seed);

}  // namespace etdfe::data
