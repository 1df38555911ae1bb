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

// On-disk formats. Every file starts with (or is) a JSON object carrying a
// "format" tag, except the CSV logs whose header row names the columns.
//
//   etdfe-config/1        scenario configuration
//   etdfe-model/1         weights as shortest round-trip decimal strings
//   etdfe-meter-key/1     one meter secret
//   etdfe-monitoring-key/1
//   etdfe-ciphertexts/1   JSON lines; first line is the header
//   etdfe-report/1        simulation report, fixed key order

#include <filesystem>
#include <string>
#include <vector>

#include "etdfe/fe.hpp"
#include "etdfe/model.hpp"
#include "etdfe/sim.hpp"

namespace etdfe::io {

namespace fs = std::filesystem;

// Writes `content`; RefuseOverwrite if the file exists and !force.
void write_file(const fs::path& path, const std::string& content, bool force);
std::string read_file(const fs::path& path);

// Exact decimal rendering of value / scale for a power-of-ten scale.
std::string scaled_decimal(std::int64_t value, std::int64_t scale);

std::string quant_to_json(const quantize::QuantScheme& q);

std::string model_to_json(const model::ModelWeights& m);
model::ModelWeights model_from_json(const std::string& text);
void write_model(const fs::path& path, const model::ModelWeights& m, bool force);
model::ModelWeights read_model(const fs::path& path);

// Relative model paths resolve against `base_dir`.
sim::ScenarioConfig config_from_json(const std::string& text,
                                     const fs::path& base_dir = {});
std::string config_to_json(const sim::ScenarioConfig& cfg);
sim::ScenarioConfig read_config(const fs::path& path);

std::string report_to_json(const sim::SimReport& report);

std::string meter_key_to_json(const fe::MeterSecretKey& key);
fe::MeterSecretKey meter_key_from_json(const std::string& text);
std::string monitoring_key_to_json(const fe::MonitoringKey& mk);
fe::MonitoringKey monitoring_key_from_json(const std::string& text);

std::string ciphertexts_to_jsonl(const std::vector<fe::Ciphertext>& cts);
std::vector<fe::Ciphertext> ciphertexts_from_jsonl(const std::string& text);

// meter_id,day_index,label,attack_tag,q1..qd with integer readings.
std::string readings_q_to_csv(const std::vector<attacks::DailyRecord>& records,
                              const std::vector<std::vector<std::int64_t>>& q);
struct QuantizedLog {
  std::vector<attacks::DailyRecord> records;  // readings left empty
  std::vector<std::vector<std::int64_t>> q;
};
QuantizedLog readings_q_from_csv(const std::string& text);

// Simulation output directory:
//   report.json is written by the caller; the directory receives
//   model.json, readings.csv, readings_q.csv, ciphertexts.jsonl and keys/.
void write_artifacts(const fs::path& dir, const sim::SimArtifacts& artifacts,
                     bool force);

struct CheckResult {
  std::string name;  // format, monitoring, billing, detection, metrics, ciphertexts
  bool pass = false;
  std::string detail;
};

// Replays the plaintext oracle from the stored logs and compares it with
// every quantity in the report.
std::vector<CheckResult> verify_run(const fs::path& report_path,
                                    const fs::path& data_dir);

}  // namespace etdfe::io
