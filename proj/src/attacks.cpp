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

#include "etdfe/attacks.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "etdfe/error.hpp"

namespace etdfe::attacks {

std::string_view label_name(Label label) {
  return label == Label::kHonest ? "honest" : "fraudulent";
}

Label parse_label(std::string_view text) {
  if (text == "honest") return Label::kHonest;
  if (text == "fraudulent") return Label::kFraudulent;
  fail(ErrorCode::kParseError, "unknown label '" + std::string(text) + "'");
}

std::string_view attack_name(Attack attack) {
  static constexpr std::string_view kNames[] = {"f1", "f2", "f3",
                                                "f4", "f5", "f6"};
  return kNames[static_cast<int>(attack) - 1];
}

Attack parse_attack(std::string_view text) {
  for (Attack a : kAllAttacks) {
    if (attack_name(a) == text) return a;
  }
  fail(ErrorCode::kParseError, "unknown attack '" + std::string(text) + "'");
}

std::size_t AttackParams::t_end(std::size_t d) const {
  return std::min<std::size_t>(static_cast<std::size_t>(t_start + duration), d);
}

AttackParams sample_params(Rng& rng, std::size_t d) {
  AttackParams p;
  p.alpha = rng.uniform(kFactorLo, kFactorHi);
  p.beta.resize(d);
  for (double& b : p.beta) b = rng.uniform(kFactorLo, kFactorHi);
  p.t_start = static_cast<int>(rng.uniform_int(0, kStartMax));
  p.duration = static_cast<int>(rng.uniform_int(kDurationMin, kDurationMax));
  return p;
}

DailyRecord apply_attack(const DailyRecord& record, Attack which,
                         const AttackParams& params) {
  if (record.label != Label::kHonest) {
    fail(ErrorCode::kInvalidArgument, "attacks apply to honest records only");
  }
  const std::vector<double>& r = record.readings;
  const std::size_t d = r.size();
  if ((which == Attack::kF2 || which == Attack::kF5) && params.beta.size() < d) {
    fail(ErrorCode::kShapeMismatch, "beta shorter than the record");
  }
  const double mean =
      d == 0 ? 0.0 : std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(d);

  DailyRecord out = record;
  out.label = Label::kFraudulent;
  out.attack = which;
  std::vector<double>& y = out.readings;
  switch (which) {
    case Attack::kF1:
      for (std::size_t j = 0; j < d; ++j) y[j] = params.alpha * r[j];
      break;
    case Attack::kF2:
      for (std::size_t j = 0; j < d; ++j) y[j] = params.beta[j] * r[j];
      break;
    case Attack::kF3:
      std::fill(y.begin(), y.end(), mean);
      break;
    case Attack::kF4: {
      const std::size_t end = params.t_end(d);
      for (std::size_t j = static_cast<std::size_t>(params.t_start); j < end; ++j) {
        y[j] = 0.0;
      }
      break;
    }
    case Attack::kF5:
      for (std::size_t j = 0; j < d; ++j) y[j] = params.beta[j] * mean;
      break;
    case Attack::kF6:
      std::reverse(y.begin(), y.end());
      break;
  }
  return out;
}

std::vector<DailyRecord> expand_dataset(const std::vector<DailyRecord>& honest,
                                        Rng& rng) {
  if (honest.empty()) fail(ErrorCode::kInvalidArgument, "no honest records");
  std::vector<DailyRecord> out;
  out.reserve(honest.size() * 7);
  for (const DailyRecord& rec : honest) {
    out.push_back(rec);
    for (Attack a : kAllAttacks) {
      out.push_back(apply_attack(rec, a, sample_params(rng, rec.readings.size())));
    }
  }
  return out;
}

}  // namespace etdfe::attacks
