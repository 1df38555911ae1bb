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

#include "etdfe/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "etdfe/error.hpp"

namespace etdfe::data {
namespace {

double bump(const Bump& b, double slot) {
  const double z = (slot - b.center) / b.width;
  return b.amplitude * std::exp(-0.5 * z * z);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(line, std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void ConsumerProfile::validate() const {
  if (base_load < 0.0 || morning.amplitude < 0.0 || evening.amplitude < 0.0 ||
      noise_sigma < 0.0) {
    fail(ErrorCode::kInvalidArgument, "profile loads must be non-negative");
  }
  for (const Bump* b : {&morning, &evening}) {
    if (b->center < 0.0 || b->center > 47.0 || b->width <= 0.0) {
      fail(ErrorCode::kInvalidArgument,
           "bump centers must lie in [0,47] with positive width");
    }
  }
}

ConsumerProfile random_profile(Rng& rng, std::uint32_t meter_id) {
  ConsumerProfile p;
  p.meter_id = meter_id;
  p.base_load = rng.uniform(0.15, 0.35);
  p.morning = Bump{rng.uniform(13.0, 17.0), rng.uniform(1.5, 3.0),
                   rng.uniform(0.3, 0.8)};
  p.evening = Bump{rng.uniform(35.0, 40.0), rng.uniform(2.5, 4.5),
                   rng.uniform(0.8, 1.6)};
  p.noise_sigma = rng.uniform(0.03, 0.08);
  p.seed = rng.next_u64();
  return p;
}

std::vector<DailyRecord> gen_honest_days(const ConsumerProfile& profile,
                                         std::size_t num_days, double max_kwh,
                                         std::size_t slots,
                                         std::uint32_t first_day) {
  profile.validate();
  if (num_days < 1) fail(ErrorCode::kInvalidArgument, "num_days must be >= 1");
  Rng rng(profile.seed);
  std::vector<DailyRecord> days;
  days.reserve(num_days);
  for (std::size_t day = 0; day < num_days; ++day) {
    DailyRecord rec;
    rec.meter_id = profile.meter_id;
    rec.day_index = first_day + static_cast<std::uint32_t>(day);
    rec.readings.resize(slots);
    for (std::size_t t = 0; t < slots; ++t) {
      const auto s = static_cast<double>(t);
      double noise = 0.0;
      if (profile.noise_sigma > 0.0) {
        noise = std::clamp(rng.normal(0.0, profile.noise_sigma),
                           -3.0 * profile.noise_sigma, 3.0 * profile.noise_sigma);
      }
      const double v = profile.base_load + bump(profile.morning, s) +
                       bump(profile.evening, s) + noise;
      rec.readings[t] = std::clamp(v, 0.0, max_kwh);
    }
    days.push_back(std::move(rec));
  }
  return days;
}

std::vector<DailyRecord> ingest_csv(std::istream& in, std::size_t slots) {
  std::vector<DailyRecord> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (line_no == 1 && trim(fields[0]) == "meter_id") continue;  // header

    DailyRecord rec;
    std::size_t first_reading = 2;
    if (fields.size() == slots + 4) {
      rec.label = attacks::parse_label(trim(fields[2]));
      const auto tag = trim(fields[3]);
      if (!tag.empty()) rec.attack = attacks::parse_attack(tag);
      first_reading = 4;
    } else if (fields.size() != slots + 2) {
      parse_fail(line_no, "expected " + std::to_string(slots + 2) + " or " +
                              std::to_string(slots + 4) + " columns, got " +
                              std::to_string(fields.size()));
    }
    rec.meter_id = parse_number<std::uint32_t>(fields[0], line_no, "meter_id");
    rec.day_index = parse_number<std::uint32_t>(fields[1], line_no, "day_index");
    rec.readings.reserve(slots);
    for (std::size_t k = first_reading; k < fields.size(); ++k) {
      const double v = parse_number<double>(fields[k], line_no, "reading");
      if (!(v >= 0.0) || !std::isfinite(v)) {
        parse_fail(line_no, "negative or non-finite reading in column " +
                                std::to_string(k + 1));
      }
      rec.readings.push_back(v);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<DailyRecord> ingest_csv(const std::filesystem::path& path,
                                    std::size_t slots) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  return ingest_csv(in, slots);
}

void export_csv(std::ostream& out, const std::vector<DailyRecord>& records) {
  const std::size_t slots =
      records.empty() ? attacks::kSlotsPerDay : records.front().readings.size();
  out << "meter_id,day_index,label,attack_tag";
  for (std::size_t t = 1; t <= slots; ++t) out << ",r" << t;
  out << '\n';
  char buf[64];
  for (const DailyRecord& rec : records) {
    out << rec.meter_id << ',' << rec.day_index << ','
        << attacks::label_name(rec.label) << ','
        << (rec.attack ? attacks::attack_name(*rec.attack) : "");
    for (double v : rec.readings) {
      std::snprintf(buf, sizeof(buf), ",%.4f", v);
      out << buf;
    }
    out << '\n';
  }
}

void export_csv(const std::filesystem::path& path,
                const std::vector<DailyRecord>& records) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  export_csv(out, records);
}

std::vector<DailyRecord> balance(const std::vector<DailyRecord>& records) {
  std::vector<std::size_t> honest;
  std::vector<std::size_t> fraud;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (records[i].label == attacks::Label::kHonest ? honest : fraud).push_back(i);
  }
  if (honest.empty() || fraud.empty()) {
    fail(ErrorCode::kDegenerateDataset, "balancing needs both classes");
  }
  std::vector<DailyRecord> out = records;
  const auto& minority = honest.size() < fraud.size() ? honest : fraud;
  const std::size_t deficit =
      std::max(honest.size(), fraud.size()) - minority.size();
  out.reserve(records.size() + deficit);
  for (std::size_t k = 0; k < deficit; ++k) {
    out.push_back(records[minority[k % minority.size()]]);
  }
  return out;
}

std::pair<std::vector<DailyRecord>, std::vector<DailyRecord>> split(
    const std::vector<DailyRecord>& records, double train_ratio,
    std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "train ratio must lie in (0,1)");
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (attacks::Label label :
       {attacks::Label::kHonest, attacks::Label::kFraudulent}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].label == label) idx.push_back(i);
    }
    rng.shuffle(idx);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_ratio * static_cast<double>(idx.size())));
    train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
    test_idx.insert(test_idx.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::pair<std::vector<DailyRecord>, std::vector<DailyRecord>> out;
  out.first.reserve(train_idx.size());
  out.second.reserve(test_idx.size());
  for (std::size_t i : train_idx) out.first.push_back(records[i]);
  for (std::size_t i : test_idx) out.second.push_back(records[i]);
  return out;
}

}  // namespace etdfe::data
