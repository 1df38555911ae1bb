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

// End-to-end simulation: a key distribution centre, a meter fleet and a
// system operator in one process. Every value the operator decrypts is
// checked against a plaintext oracle before it reaches the report.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "etdfe/attacks.hpp"
#include "etdfe/fe.hpp"
#include "etdfe/model.hpp"
#include "etdfe/quantize.hpp"

namespace etdfe::sim {

using attacks::Attack;
using attacks::Label;
using fe::MeterId;

struct ModelSource {
  enum class Kind { kTrain, kLoad };

  Kind kind = Kind::kTrain;
  std::string path;             // weights file when kind == kLoad
  std::string arch = "desk";    // desk | table3, when training
  std::size_t train_days = 40;  // honest days per meter in the training corpus
  model::TrainParams train;
};

struct ScenarioConfig {
  std::size_t num_meters = 10;
  std::size_t slots_per_day = attacks::kSlotsPerDay;
  std::size_t b = 48;           // slots per billing period
  std::size_t d = 48;           // slots per detection period
  std::vector<double> rates;    // b tariffs, money per kWh
  double fraud_fraction = 0.2;  // share of meters that tamper
  std::array<double, 6> attack_mix{1.0 / 6, 1.0 / 6, 1.0 / 6,
                                   1.0 / 6, 1.0 / 6, 1.0 / 6};
  std::size_t days = 2;
  quantize::QuantScheme quant;
  std::uint64_t seed = 1;
  ModelSource model;

  std::string epoch = "sim";                // slot label prefix
  std::uint64_t dlog_table_bound = 1 << 20;  // giant steps cover the rest
  bool conventional_dr = false;  // also report recall-style TP/(TP+FN)
  bool measure_overhead = false;  // timings make the report non-reproducible

  // b >= 1, d >= 2, whole periods, mix sums to 1, rates sized b.
  void validate() const;
  std::size_t total_slots() const { return days * slots_per_day; }
};

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  void add(Label truth, Label predicted);
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Exact num/den; den == 0 means undefined.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  bool defined() const { return den != 0; }
  double value() const;
  // Six fractional digits, half-even on the exact rational; nullopt if
  // undefined.
  std::optional<std::string> fixed6() const;
};

struct Metrics {
  Ratio dr;        // TP / (TP + FP), as printed in the metric definitions
  Ratio fa;        // FP / (TN + FP)
  Ratio hd;        // DR - FA
  Ratio accuracy;  // (TP + TN) / total
  Ratio recall;    // TP / (TP + FN), the conventional detection rate
};

Metrics metrics(const Confusion& c);

struct SlotTotal {
  fe::SlotLabel slot;
  std::int64_t total_q = 0;
  double kwh = 0.0;
};

struct Bill {
  MeterId meter_id = 0;
  std::size_t period = 0;
  std::int64_t amount_q = 0;  // reading_scale * rate_scale units
  double amount = 0.0;
};

struct Verdict {
  MeterId meter_id = 0;
  std::size_t period = 0;
  Label truth = Label::kHonest;
  std::optional<Attack> attack;
  Label predicted = Label::kHonest;
  double p_fraud = 0.0;
};

struct Overhead {
  double encrypt_us = 0.0;    // median per reading
  double aggregate_us = 0.0;  // median per slot, fleet-wide
  double billing_us = 0.0;    // median per billing period
  double detect_ms = 0.0;     // median per record, decryption + inference
  std::size_t ciphertext_bytes = 0;
};

struct TrainingSummary {
  std::size_t train_records = 0;
  std::size_t test_records = 0;
  Confusion test;
};

struct SimReport {
  ScenarioConfig config;
  std::array<std::uint8_t, 32> weight_digest{};
  std::int64_t weight_max_abs = 0;
  std::optional<TrainingSummary> training;
  std::vector<SlotTotal> slots;
  std::vector<Bill> bills;
  std::vector<Verdict> verdicts;
  Confusion confusion;
  std::optional<Overhead> overhead;
};

// Everything an auditor needs to replay the oracle; the operator in a real
// deployment never holds the plaintext half of this.
struct SimArtifacts {
  model::ModelWeights model;
  std::vector<attacks::DailyRecord> records;       // kWh as reported
  std::vector<std::vector<std::int64_t>> readings_q;  // parallel to records
  std::vector<fe::MeterSecretKey> keys;
  std::vector<fe::Ciphertext> ciphertexts;  // meter-major, slot order
};

SimReport run_scenario(const ScenarioConfig& cfg,
                       SimArtifacts* artifacts = nullptr);

// Same, with the model supplied instead of cfg.model.
SimReport run_scenario(const ScenarioConfig& cfg, const model::ModelWeights& m,
                       SimArtifacts* artifacts = nullptr);

// Detection-quality study on synthetic data: honest days for `meters`
// meters, expanded with f1..f6, split 4:1 by class, each side balanced by
// oversampling, then trained and scored on the held-out side.
struct StudyConfig {
  std::size_t meters = 50;
  std::size_t days = 200;
  std::size_t slots = attacks::kSlotsPerDay;
  double train_ratio = 0.8;
  model::Architecture arch = model::Architecture::desk();
  model::TrainParams train;
  quantize::QuantScheme quant;
  std::uint64_t seed = 7;
};

struct StudyResult {
  model::ModelWeights model;
  TrainingSummary summary;
  double baseline_accuracy = 0.0;  // majority class of the test side
};

StudyResult run_study(const StudyConfig& cfg);

// Same pipeline on caller-supplied labelled records.
StudyResult train_and_score(const std::vector<attacks::DailyRecord>& records,
                            const model::Architecture& arch,
                            const model::TrainParams& hp,
                            const quantize::QuantScheme& quant,
                            double train_ratio, std::uint64_t seed);

struct BenchResult {
  Overhead overhead;
  std::size_t reps = 0;
  std::size_t meters = 0;
  std::size_t neurons = 0;
};

// Median-of-reps timings against a warmed table.
BenchResult bench(const ScenarioConfig& cfg, const model::ModelWeights& m,
                  std::size_t reps);

model::Architecture arch_preset(const std::string& name, std::size_t d);

}  // namespace etdfe::sim
