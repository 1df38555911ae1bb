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

#include "etdfe/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "etdfe/data.hpp"
#include "etdfe/dlog.hpp"
#include "etdfe/error.hpp"

namespace etdfe::io {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void format_fail(const std::string& msg) {
  fail(ErrorCode::kFormatError, msg);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    format_fail(std::string(what) + ": " + e.what());
  }
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    format_fail(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    format_fail(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key);
}

void expect_format(const json& j, const char* tag) {
  const auto got = get<std::string>(j, "format");
  if (got != tag) {
    format_fail("expected format '" + std::string(tag) + "', got '" + got + "'");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!ok) format_fail(std::string(where) + ": unknown field '" + it.key() + "'");
  }
}

// Shortest decimal that parses back to the same double.
std::string exact_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    format_fail("bad decimal '" + s + "'");
  }
  return v;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

json ratio_json(const sim::Ratio& r) {
  auto s = r.fixed6();
  return s ? json(*s) : json(nullptr);
}

json confusion_json(const sim::Confusion& c) {
  json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  return j;
}

json metrics_json(const sim::Confusion& c, bool conventional) {
  const auto m = sim::metrics(c);
  json j;
  j["dr"] = ratio_json(m.dr);
  j["fa"] = ratio_json(m.fa);
  j["hd"] = ratio_json(m.hd);
  j["accuracy"] = ratio_json(m.accuracy);
  if (conventional) j["dr_conventional"] = ratio_json(m.recall);
  return j;
}

json quant_json(const quantize::QuantScheme& q) {
  json j;
  j["reading_scale"] = q.reading_scale;
  j["weight_scale"] = q.weight_scale;
  j["rate_scale"] = q.rate_scale;
  j["reading_max"] = q.reading_max;
  return j;
}

quantize::QuantScheme quant_from(const json& j) {
  reject_unknown(j, {"reading_scale", "weight_scale", "rate_scale", "reading_max"},
                 "quant");
  quantize::QuantScheme q;
  q.reading_scale = get_or<std::int64_t>(j, "reading_scale", q.reading_scale);
  q.weight_scale = get_or<std::int64_t>(j, "weight_scale", q.weight_scale);
  q.rate_scale = get_or<std::int64_t>(j, "rate_scale", q.rate_scale);
  q.reading_max = get_or<std::int64_t>(j, "reading_max", q.reading_max);
  q.validate();
  return q;
}

std::string digest_hex(const std::array<std::uint8_t, 32>& d) {
  return group::to_hex(d);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

void write_file(const fs::path& path, const std::string& content, bool force) {
  if (!force && fs::exists(path)) {
    fail(ErrorCode::kRefuseOverwrite,
         path.string() + " exists (pass --force to replace it)");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scaled_decimal(std::int64_t value, std::int64_t scale) {
  int digits = 0;
  for (std::int64_t s = scale; s > 1; s /= 10) ++digits;
  const bool neg = value < 0;
  const auto mag = static_cast<unsigned long long>(neg ? -(value + 1) : value) +
                   (neg ? 1ULL : 0ULL);
  std::string text = std::to_string(mag);
  if (digits > 0) {
    if (text.size() <= static_cast<std::size_t>(digits)) {
      text.insert(0, static_cast<std::size_t>(digits) + 1 - text.size(), '0');
    }
    text.insert(text.size() - static_cast<std::size_t>(digits), ".");
  }
  return neg ? "-" + text : text;
}

std::string quant_to_json(const quantize::QuantScheme& q) {
  return quant_json(q).dump();
}

// --- model ------------------------------------------------------------------

std::string model_to_json(const model::ModelWeights& m) {
  m.validate();
  json j;
  j["format"] = "etdfe-model/1";
  json arch;
  arch["layer_sizes"] = m.arch.layer_sizes;
  json acts = json::array();
  for (auto a : m.arch.activations) acts.push_back(model::activation_name(a));
  arch["activations"] = acts;
  j["arch"] = arch;
  j["quant"] = quant_json(m.quant);
  json layers = json::array();
  for (const auto& layer : m.layers) {
    json l;
    l["in"] = layer.in;
    l["out"] = layer.out;
    json w = json::array();
    for (double v : layer.w) w.push_back(exact_double(v));
    json b = json::array();
    for (double v : layer.b) b.push_back(exact_double(v));
    l["w"] = w;
    l["b"] = b;
    layers.push_back(l);
  }
  j["layers"] = layers;
  return j.dump() + "\n";
}

model::ModelWeights model_from_json(const std::string& text) {
  const json j = parse_json(text, "model");
  expect_format(j, "etdfe-model/1");
  const json& arch_j = field(j, "arch");
  model::Architecture arch;
  arch.layer_sizes = get<std::vector<std::size_t>>(arch_j, "layer_sizes");
  for (const auto& a : get<std::vector<std::string>>(arch_j, "activations")) {
    arch.activations.push_back(model::parse_activation(a));
  }
  arch.validate();
  auto m = model::ModelWeights::zeros(arch, quant_from(field(j, "quant")));
  const json& layers = field(j, "layers");
  if (!layers.is_array() || layers.size() != m.layers.size()) {
    format_fail("model: layer count does not match architecture");
  }
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto w = get<std::vector<std::string>>(layers[l], "w");
    const auto b = get<std::vector<std::string>>(layers[l], "b");
    if (w.size() != m.layers[l].w.size() || b.size() != m.layers[l].b.size()) {
      fail(ErrorCode::kShapeMismatch,
           "model: layer " + std::to_string(l) + " has the wrong shape");
    }
    for (std::size_t k = 0; k < w.size(); ++k) m.layers[l].w[k] = parse_double(w[k]);
    for (std::size_t k = 0; k < b.size(); ++k) m.layers[l].b[k] = parse_double(b[k]);
  }
  m.validate();
  return m;
}

void write_model(const fs::path& path, const model::ModelWeights& m, bool force) {
  write_file(path, model_to_json(m), force);
}

model::ModelWeights read_model(const fs::path& path) {
  return model_from_json(read_file(path));
}

// --- config -----------------------------------------------------------------

sim::ScenarioConfig config_from_json(const std::string& text,
                                     const fs::path& base_dir) {
  const json j = parse_json(text, "config");
  expect_format(j, "etdfe-config/1");
  reject_unknown(j,
                 {"format", "num_meters", "slots_per_day", "b", "d", "rates",
                  "fraud_fraction", "attack_mix", "days", "quant", "seed",
                  "model", "epoch", "dlog_table_bound", "conventional_dr",
                  "measure_overhead"},
                 "config");
  sim::ScenarioConfig cfg;
  cfg.num_meters = get<std::size_t>(j, "num_meters");
  cfg.days = get<std::size_t>(j, "days");
  cfg.slots_per_day = get_or<std::size_t>(j, "slots_per_day", cfg.slots_per_day);
  cfg.b = get_or<std::size_t>(j, "b", cfg.b);
  cfg.d = get_or<std::size_t>(j, "d", cfg.d);
  const json& rates = field(j, "rates");
  if (rates.is_number()) {
    cfg.rates.assign(cfg.b, rates.get<double>());  // flat tariff shorthand
  } else {
    cfg.rates = get<std::vector<double>>(j, "rates");
  }
  cfg.fraud_fraction = get_or<double>(j, "fraud_fraction", cfg.fraud_fraction);
  if (j.contains("attack_mix")) {
    const auto mix = get<std::vector<double>>(j, "attack_mix");
    if (mix.size() != 6) format_fail("attack_mix needs six weights");
    std::copy(mix.begin(), mix.end(), cfg.attack_mix.begin());
  }
  if (j.contains("quant")) cfg.quant = quant_from(j.at("quant"));
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.epoch = get_or<std::string>(j, "epoch", cfg.epoch);
  cfg.dlog_table_bound =
      get_or<std::uint64_t>(j, "dlog_table_bound", cfg.dlog_table_bound);
  cfg.conventional_dr = get_or<bool>(j, "conventional_dr", cfg.conventional_dr);
  cfg.measure_overhead = get_or<bool>(j, "measure_overhead", cfg.measure_overhead);
  if (j.contains("model")) {
    const json& mj = j.at("model");
    reject_unknown(mj,
                   {"source", "path", "arch", "train_days", "epochs", "batch",
                    "lr", "l2", "seed"},
                   "model");
    const auto source = get_or<std::string>(mj, "source", "train");
    auto& src = cfg.model;
    if (source == "load") {
      src.kind = sim::ModelSource::Kind::kLoad;
      fs::path p = get<std::string>(mj, "path");
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      src.path = p.string();
    } else if (source == "train") {
      src.kind = sim::ModelSource::Kind::kTrain;
    } else {
      format_fail("model.source must be 'train' or 'load'");
    }
    src.arch = get_or<std::string>(mj, "arch", src.arch);
    src.train_days = get_or<std::size_t>(mj, "train_days", src.train_days);
    src.train.epochs = get_or<std::size_t>(mj, "epochs", src.train.epochs);
    src.train.batch = get_or<std::size_t>(mj, "batch", src.train.batch);
    src.train.lr = get_or<double>(mj, "lr", src.train.lr);
    src.train.l2 = get_or<double>(mj, "l2", src.train.l2);
    src.train.seed = get_or<std::uint64_t>(mj, "seed", src.train.seed);
  }
  cfg.validate();
  return cfg;
}

namespace {

json config_json(const sim::ScenarioConfig& cfg) {
  json j;
  j["format"] = "etdfe-config/1";
  j["num_meters"] = cfg.num_meters;
  j["slots_per_day"] = cfg.slots_per_day;
  j["b"] = cfg.b;
  j["d"] = cfg.d;
  j["rates"] = cfg.rates;
  j["fraud_fraction"] = cfg.fraud_fraction;
  j["attack_mix"] = cfg.attack_mix;
  j["days"] = cfg.days;
  j["quant"] = quant_json(cfg.quant);
  j["seed"] = cfg.seed;
  json mj;
  if (cfg.model.kind == sim::ModelSource::Kind::kLoad) {
    mj["source"] = "load";
    mj["path"] = cfg.model.path;
  } else {
    mj["source"] = "train";
    mj["arch"] = cfg.model.arch;
    mj["train_days"] = cfg.model.train_days;
    mj["epochs"] = cfg.model.train.epochs;
    mj["batch"] = cfg.model.train.batch;
    mj["lr"] = cfg.model.train.lr;
    mj["l2"] = cfg.model.train.l2;
    mj["seed"] = cfg.model.train.seed;
  }
  j["model"] = mj;
  j["epoch"] = cfg.epoch;
  j["dlog_table_bound"] = cfg.dlog_table_bound;
  j["conventional_dr"] = cfg.conventional_dr;
  j["measure_overhead"] = cfg.measure_overhead;
  return j;
}

}  // namespace

std::string config_to_json(const sim::ScenarioConfig& cfg) {
  return dump(config_json(cfg));
}

sim::ScenarioConfig read_config(const fs::path& path) {
  return config_from_json(read_file(path), path.parent_path());
}

// --- report -----------------------------------------------------------------

std::string report_to_json(const sim::SimReport& r) {
  const auto& q = r.config.quant;
  json j;
  j["format"] = "etdfe-report/1";
  j["config"] = config_json(r.config);

  json mj;
  mj["weight_digest"] = digest_hex(r.weight_digest);
  mj["weight_max_abs"] = r.weight_max_abs;
  if (r.training) {
    json t;
    t["train_records"] = r.training->train_records;
    t["test_records"] = r.training->test_records;
    t["confusion"] = confusion_json(r.training->test);
    t["metrics"] = metrics_json(r.training->test, r.config.conventional_dr);
    mj["training"] = t;
  } else {
    mj["training"] = nullptr;
  }
  j["model"] = mj;

  json slots = json::array();
  for (const auto& s : r.slots) {
    json e;
    e["slot"] = s.slot.bytes();
    e["total_q"] = s.total_q;
    e["kwh"] = scaled_decimal(s.total_q, q.reading_scale);
    slots.push_back(e);
  }
  j["monitoring"] = slots;

  json bills = json::array();
  for (const auto& b : r.bills) {
    json e;
    e["meter_id"] = b.meter_id;
    e["period"] = b.period;
    e["amount_q"] = b.amount_q;
    e["amount"] = scaled_decimal(b.amount_q, q.reading_scale * q.rate_scale);
    bills.push_back(e);
  }
  j["billing"] = bills;

  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json e;
    e["meter_id"] = v.meter_id;
    e["period"] = v.period;
    e["truth"] = attacks::label_name(v.truth);
    e["attack"] = v.attack ? json(attacks::attack_name(*v.attack)) : json(nullptr);
    e["predicted"] = attacks::label_name(v.predicted);
    e["p_fraud"] = fixed6(v.p_fraud);
    verdicts.push_back(e);
  }
  j["detection"] = verdicts;
  j["confusion"] = confusion_json(r.confusion);
  j["metrics"] = metrics_json(r.confusion, r.config.conventional_dr);
  if (r.overhead) {
    json o;
    o["encrypt_us_per_reading"] = fixed6(r.overhead->encrypt_us);
    o["aggregate_us_per_slot"] = fixed6(r.overhead->aggregate_us);
    o["billing_us_per_period"] = fixed6(r.overhead->billing_us);
    o["detect_ms_per_record"] = fixed6(r.overhead->detect_ms);
    o["ciphertext_bytes"] = r.overhead->ciphertext_bytes;
    j["overhead"] = o;
  } else {
    j["overhead"] = nullptr;
  }
  return dump(j);
}

// --- keys -------------------------------------------------------------------

std::string meter_key_to_json(const fe::MeterSecretKey& key) {
  json j;
  j["format"] = "etdfe-meter-key/1";
  j["meter_id"] = key.meter_id;
  j["s"] = {key.s[0].hex(), key.s[1].hex()};
  return dump(j);
}

fe::MeterSecretKey meter_key_from_json(const std::string& text) {
  const json j = parse_json(text, "meter key");
  expect_format(j, "etdfe-meter-key/1");
  fe::MeterSecretKey key;
  key.meter_id = get<fe::MeterId>(j, "meter_id");
  const auto s = get<std::vector<std::string>>(j, "s");
  if (s.size() != 2) format_fail("meter key needs two scalars");
  key.s = {group::Scalar::from_hex(s[0]), group::Scalar::from_hex(s[1])};
  return key;
}

std::string monitoring_key_to_json(const fe::MonitoringKey& mk) {
  json j;
  j["format"] = "etdfe-monitoring-key/1";
  j["meter_ids"] = mk.meter_ids;
  j["dk"] = {mk.dk[0].hex(), mk.dk[1].hex()};
  return dump(j);
}

fe::MonitoringKey monitoring_key_from_json(const std::string& text) {
  const json j = parse_json(text, "monitoring key");
  expect_format(j, "etdfe-monitoring-key/1");
  fe::MonitoringKey mk;
  mk.meter_ids = get<std::vector<fe::MeterId>>(j, "meter_ids");
  const auto dk = get<std::vector<std::string>>(j, "dk");
  if (dk.size() != 2) format_fail("monitoring key needs two scalars");
  mk.dk = {group::Scalar::from_hex(dk[0]), group::Scalar::from_hex(dk[1])};
  return mk;
}

// --- ciphertexts --------------------------------------------------------------

std::string ciphertexts_to_jsonl(const std::vector<fe::Ciphertext>& cts) {
  std::string out;
  json header;
  header["format"] = "etdfe-ciphertexts/1";
  header["count"] = cts.size();
  out += header.dump() + "\n";
  for (const auto& ct : cts) {
    json line;
    line["meter_id"] = ct.meter_id;
    line["slot"] = ct.slot.bytes();
    line["c"] = ct.c.hex();
    out += line.dump() + "\n";
  }
  return out;
}

std::vector<fe::Ciphertext> ciphertexts_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) format_fail("ciphertexts: empty file");
  const json header = parse_json(line, "ciphertexts header");
  expect_format(header, "etdfe-ciphertexts/1");
  const auto count = get<std::size_t>(header, "count");
  std::vector<fe::Ciphertext> cts;
  cts.reserve(count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = parse_json(line, "ciphertext");
    fe::Ciphertext ct;
    ct.meter_id = get<fe::MeterId>(j, "meter_id");
    ct.slot = fe::SlotLabel::parse(get<std::string>(j, "slot"));
    ct.c = group::GroupElement::from_hex(get<std::string>(j, "c"));
    cts.push_back(std::move(ct));
  }
  if (cts.size() != count) {
    format_fail("ciphertexts: header says " + std::to_string(count) +
                " lines, found " + std::to_string(cts.size()));
  }
  return cts;
}

// --- quantized readings log ---------------------------------------------------

std::string readings_q_to_csv(const std::vector<attacks::DailyRecord>& records,
                              const std::vector<std::vector<std::int64_t>>& q) {
  if (records.size() != q.size()) {
    fail(ErrorCode::kShapeMismatch, "one quantized row per record");
  }
  std::ostringstream out;
  out << "meter_id,day_index,label,attack_tag";
  const std::size_t width = q.empty() ? 0 : q.front().size();
  for (std::size_t t = 1; t <= width; ++t) out << ",q" << t;
  out << "\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& rec = records[k];
    out << rec.meter_id << ',' << rec.day_index << ','
        << attacks::label_name(rec.label) << ','
        << (rec.attack ? attacks::attack_name(*rec.attack) : "");
    for (auto v : q[k]) out << ',' << v;
    out << "\n";
  }
  return out.str();
}

QuantizedLog readings_q_from_csv(const std::string& text) {
  QuantizedLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& msg) {
    fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (line_no == 1 && !f.empty() && f[0] == "meter_id") continue;
    if (f.size() < 5) bad("too few columns");
    attacks::DailyRecord rec;
    std::vector<std::int64_t> row;
    auto num = [&](const std::string& s) {
      std::int64_t v = 0;
      auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        bad("bad integer '" + s + "'");
      }
      return v;
    };
    rec.meter_id = static_cast<std::uint32_t>(num(f[0]));
    rec.day_index = static_cast<std::uint32_t>(num(f[1]));
    rec.label = attacks::parse_label(f[2]);
    if (!f[3].empty()) rec.attack = attacks::parse_attack(f[3]);
    for (std::size_t c = 4; c < f.size(); ++c) row.push_back(num(f[c]));
    if (!log.q.empty() && row.size() != log.q.front().size()) {
      bad("row width differs from the first row");
    }
    log.records.push_back(std::move(rec));
    log.q.push_back(std::move(row));
  }
  return log;
}

void write_artifacts(const fs::path& dir, const sim::SimArtifacts& a, bool force) {
  write_model(dir / "model.json", a.model, force);
  std::ostringstream kwh;
  data::export_csv(kwh, a.records);
  write_file(dir / "readings.csv", kwh.str(), force);
  write_file(dir / "readings_q.csv", readings_q_to_csv(a.records, a.readings_q),
             force);
  write_file(dir / "ciphertexts.jsonl", ciphertexts_to_jsonl(a.ciphertexts), force);
  for (const auto& key : a.keys) {
    write_file(dir / "keys" / ("meter_" + std::to_string(key.meter_id) + ".json"),
               meter_key_to_json(key), force);
  }
  write_file(dir / "keys" / "monitoring.json",
             monitoring_key_to_json(fe::derive_monitoring_key(a.keys)), force);
}

// --- verify -------------------------------------------------------------------

namespace {

class Checker {
 public:
  explicit Checker(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++checked_;
    if (!ok && first_error_.empty()) first_error_ = what;
    if (!ok) ++failed_;
  }

  CheckResult finish() {
    result_.pass = failed_ == 0;
    result_.detail = result_.pass
                         ? std::to_string(checked_) + " checks"
                         : std::to_string(failed_) + "/" + std::to_string(checked_) +
                               " failed; first: " + first_error_;
    return result_;
  }

 private:
  CheckResult result_;
  std::size_t checked_ = 0;
  std::size_t failed_ = 0;
  std::string first_error_;
};

// Runs `body`; library errors become a failed check rather than an abort.
template <typename F>
CheckResult guarded(const std::string& name, F body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return CheckResult{name, false, e.what()};
  }
}

}  // namespace

std::vector<CheckResult> verify_run(const fs::path& report_path,
                                    const fs::path& data_dir) {
  if (!fs::is_directory(data_dir)) {
    fail(ErrorCode::kIoError, "data directory " + data_dir.string() + " not found");
  }
  const json report = parse_json(read_file(report_path), "report");
  std::vector<CheckResult> out;

  sim::ScenarioConfig cfg;
  out.push_back(guarded("format", [&] {
    Checker c("format");
    expect_format(report, "etdfe-report/1");
    cfg = config_from_json(field(report, "config").dump(), {});
    c.expect(true, "");
    return c.finish();
  }));
  if (!out.back().pass) return out;
  const auto& q = cfg.quant;
  const std::size_t T = cfg.total_slots();

  // Plaintext stream per meter, days in order.
  const auto log = readings_q_from_csv(read_file(data_dir / "readings_q.csv"));
  std::map<fe::MeterId, std::vector<std::pair<std::uint32_t, std::size_t>>> days;
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    days[log.records[k].meter_id].emplace_back(log.records[k].day_index, k);
  }
  std::map<fe::MeterId, std::vector<std::int64_t>> stream;
  std::map<fe::MeterId, std::vector<attacks::Label>> day_label;
  for (auto& [id, list] : days) {
    std::sort(list.begin(), list.end());
    for (const auto& [day, k] : list) {
      stream[id].insert(stream[id].end(), log.q[k].begin(), log.q[k].end());
      day_label[id].push_back(log.records[k].label);
    }
  }

  out.push_back(guarded("monitoring", [&] {
    Checker c("monitoring");
    const json& slots = field(report, "monitoring");
    c.expect(slots.size() == T, "slot count");
    for (std::size_t g = 0; g < std::min<std::size_t>(T, slots.size()); ++g) {
      std::int64_t expect = 0;
      for (const auto& [id, s] : stream) expect += g < s.size() ? s[g] : 0;
      const json& e = slots[g];
      const std::string label = fe::SlotLabel{cfg.epoch, g + 1}.bytes();
      c.expect(get<std::string>(e, "slot") == label, "label of slot " + label);
      c.expect(get<std::int64_t>(e, "total_q") == expect, "total of slot " + label);
      c.expect(get<std::string>(e, "kwh") == scaled_decimal(expect, q.reading_scale),
               "kWh of slot " + label);
    }
    return c.finish();
  }));

  out.push_back(guarded("billing", [&] {
    Checker c("billing");
    const auto rates_q = quantize::quantize_rates(cfg.rates, q);
    const json& bills = field(report, "billing");
    std::size_t k = 0;
    c.expect(bills.size() == stream.size() * (T / cfg.b), "bill count");
    for (const auto& [id, s] : stream) {
      for (std::size_t p = 0; p < T / cfg.b && k < bills.size(); ++p, ++k) {
        std::int64_t expect = 0;
        for (std::size_t t = 0; t < cfg.b; ++t) expect += rates_q[t] * s[p * cfg.b + t];
        const json& e = bills[k];
        const std::string where =
            "meter " + std::to_string(id) + " period " + std::to_string(p);
        c.expect(get<fe::MeterId>(e, "meter_id") == id &&
                     get<std::size_t>(e, "period") == p,
                 "order at " + where);
        c.expect(get<std::int64_t>(e, "amount_q") == expect, "amount_q at " + where);
        c.expect(get<std::string>(e, "amount") ==
                     scaled_decimal(expect, q.reading_scale * q.rate_scale),
                 "amount at " + where);
      }
    }
    return c.finish();
  }));

  out.push_back(guarded("detection", [&] {
    Checker c("detection");
    const auto m = read_model(data_dir / "model.json");
    const auto split = model::split_first_layer(m);
    const json& mj = field(report, "model");
    c.expect(get<std::string>(mj, "weight_digest") == digest_hex(split.digest),
             "model digest");
    const json& verdicts = field(report, "detection");
    c.expect(verdicts.size() == stream.size() * (T / cfg.d), "verdict count");
    std::size_t k = 0;
    for (const auto& [id, s] : stream) {
      for (std::size_t p = 0; p < T / cfg.d && k < verdicts.size(); ++p, ++k) {
        const std::vector<std::int64_t> window(
            s.begin() + static_cast<std::ptrdiff_t>(p * cfg.d),
            s.begin() + static_cast<std::ptrdiff_t>((p + 1) * cfg.d));
        const auto pred = model::infer_quantized(m, split, window);
        bool fraud = false;
        for (std::size_t g = p * cfg.d; g < (p + 1) * cfg.d; ++g) {
          fraud = fraud || day_label[id][g / cfg.slots_per_day] ==
                               attacks::Label::kFraudulent;
        }
        const json& e = verdicts[k];
        const std::string where =
            "meter " + std::to_string(id) + " period " + std::to_string(p);
        c.expect(get<fe::MeterId>(e, "meter_id") == id &&
                     get<std::size_t>(e, "period") == p,
                 "order at " + where);
        c.expect(get<std::string>(e, "truth") ==
                     attacks::label_name(fraud ? attacks::Label::kFraudulent
                                               : attacks::Label::kHonest),
                 "truth at " + where);
        c.expect(get<std::string>(e, "predicted") == attacks::label_name(pred.label),
                 "verdict at " + where);
        c.expect(get<std::string>(e, "p_fraud") == fixed6(pred.probs[1]),
                 "p_fraud at " + where);
      }
    }
    return c.finish();
  }));

  out.push_back(guarded("metrics", [&] {
    Checker c("metrics");
    sim::Confusion conf;
    for (const json& e : field(report, "detection")) {
      conf.add(attacks::parse_label(get<std::string>(e, "truth")),
               attacks::parse_label(get<std::string>(e, "predicted")));
    }
    c.expect(field(report, "confusion") == confusion_json(conf), "confusion counts");
    c.expect(field(report, "metrics") == metrics_json(conf, cfg.conventional_dr),
             "metric values");
    return c.finish();
  }));

  out.push_back(guarded("ciphertexts", [&] {
    Checker c("ciphertexts");
    const auto cts = ciphertexts_from_jsonl(read_file(data_dir / "ciphertexts.jsonl"));
    c.expect(cts.size() == stream.size() * T, "ciphertext count");
    std::set<std::pair<fe::MeterId, fe::SlotLabel>> seen;
    std::map<std::uint64_t, std::vector<fe::Ciphertext>> by_slot;
    for (const auto& ct : cts) {
      c.expect(seen.emplace(ct.meter_id, ct.slot).second,
               "duplicate (meter, slot) " + ct.slot.bytes());
      by_slot[ct.slot.index].push_back(ct);
    }
    const auto mk =
        monitoring_key_from_json(read_file(data_dir / "keys" / "monitoring.json"));
    const std::uint64_t bound = quantize::dlog_bound_for(
        quantize::Purpose::kMonitoring, mk.meter_ids.size(), 1, q);
    const auto table = group::DlogTable::build(
        std::min<std::uint64_t>(bound, cfg.dlog_table_bound), bound);
    for (const auto& [index, column] : by_slot) {
      std::int64_t expect = 0;
      for (const auto& [id, s] : stream) expect += index - 1 < s.size() ? s[index - 1] : 0;
      std::int64_t got = 0;
      try {
        got = fe::aggregate_decrypt(column, mk, table);
      } catch (const Error& e) {
        c.expect(false, "slot " + std::to_string(index) + ": " + e.what());
        continue;
      }
      c.expect(got == expect, "decrypted aggregate of slot " + std::to_string(index));
    }
    return c.finish();
  }));
  return out;
}

}  // namespace etdfe::io
