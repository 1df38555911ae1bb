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

// Synthetic electricity-theft attacks applied to one day of readings.
//
//   f1  alpha * r[j]                      flat partial reduction
//   f2  beta[j] * r[j]                    time-varying partial reduction
//   f3  mean(r)                           report the daily mean
//   f4  0 on [t_start, t_end), else r[j]  by-pass for an interval
//   f5  beta[j] * mean(r)                 by-pass / partial reduction
//   f6  r[d-1-j]                          reversed day (load shifting)
//
// alpha and beta[j] ~ U[0.1, 0.6]; t_start ~ U{0..42}; duration ~ U{6..48};
// t_end = min(t_start + duration, d).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etdfe/random.hpp"

namespace etdfe::attacks {

inline constexpr std::size_t kSlotsPerDay = 48;

enum class Label { kHonest, kFraudulent };
enum class Attack { kF1 = 1, kF2, kF3, kF4, kF5, kF6 };

inline constexpr std::array<Attack, 6> kAllAttacks = {
    Attack::kF1, Attack::kF2, Attack::kF3,
    Attack::kF4, Attack::kF5, Attack::kF6};

std::string_view label_name(Label label);
Label parse_label(std::string_view text);
std::string_view attack_name(Attack attack);
Attack parse_attack(std::string_view text);

struct DailyRecord {
  std::uint32_t meter_id = 0;
  std::uint32_t day_index = 0;
  std::vector<double> readings;  // kWh per slot
  Label label = Label::kHonest;
  std::optional<Attack> attack;

  friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

struct AttackParams {
  double alpha = 0.0;
  std::vector<double> beta;
  int t_start = 0;
  int duration = 0;

  std::size_t t_end(std::size_t d) const;
};

inline constexpr double kFactorLo = 0.1;
inline constexpr double kFactorHi = 0.6;
inline constexpr int kStartMax = 42;
inline constexpr int kDurationMin = 6;
inline constexpr int kDurationMax = 48;

AttackParams sample_params(Rng& rng, std::size_t d = kSlotsPerDay);

// Requires an honest record with |beta| >= |readings|.
DailyRecord apply_attack(const DailyRecord& record, Attack which,
                         const AttackParams& params);

// Each honest record followed by its six attacked variants, fresh parameters
// per variant.
std::vector<DailyRecord> expand_dataset(const std::vector<DailyRecord>& honest,
                                        Rng& rng);

}  // namespace etdfe::attacks
