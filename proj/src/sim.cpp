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

#include "etdfe/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "etdfe/data.hpp"
#include "etdfe/dlog.hpp"
#include "etdfe/error.hpp"
#include "etdfe/io.hpp"
#include "etdfe/kernels.hpp"
#include "etdfe/random.hpp"

namespace etdfe::sim {
namespace {

using Clock = std::chrono::steady_clock;
__extension__ using i128 = __int128;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

void oracle_check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kOracleMismatch, what);
}

std::vector<data::ConsumerProfile> fleet_profiles(std::size_t n,
                                                  std::uint64_t seed) {
  Rng rng = Rng(seed).fork(1);
  std::vector<data::ConsumerProfile> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(data::random_profile(rng, static_cast<MeterId>(i + 1)));
  }
  return out;
}

std::vector<fe::SlotLabel> period_labels(const std::vector<fe::SlotLabel>& all,
                                         std::size_t first, std::size_t len) {
  return {all.begin() + static_cast<std::ptrdiff_t>(first),
          all.begin() + static_cast<std::ptrdiff_t>(first + len)};
}

Attack pick_attack(Rng& rng, const std::array<double, 6>& mix) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < mix.size(); ++k) {
    acc += mix[k];
    if (u < acc) return attacks::kAllAttacks[k];
  }
  // Rounding left u above the running sum; take the last weighted attack.
  for (std::size_t k = mix.size(); k-- > 0;) {
    if (mix[k] > 0.0) return attacks::kAllAttacks[k];
  }
  return Attack::kF1;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

Ratio make_ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return Ratio{0, 0};
  const std::int64_t g = gcd64(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Ratio{num, den};
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_meters < 2) {
    fail(ErrorCode::kTooFewMeters, "a scenario needs at least two meters");
  }
  if (slots_per_day < 1 || days < 1) {
    fail(ErrorCode::kInvalidArgument, "slots_per_day and days must be >= 1");
  }
  if (b < 1) fail(ErrorCode::kInvalidArgument, "b must be >= 1");
  if (d < 2) fail(ErrorCode::kInvalidArgument, "d must be >= 2");
  if (total_slots() % b != 0 || total_slots() % d != 0) {
    fail(ErrorCode::kInvalidArgument,
         "days * slots_per_day must be a whole number of billing and "
         "detection periods");
  }
  if (rates.size() != b) {
    fail(ErrorCode::kShapeMismatch,
         "need " + std::to_string(b) + " rates, got " + std::to_string(rates.size()));
  }
  if (!(fraud_fraction >= 0.0 && fraud_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "fraud_fraction must lie in [0,1]");
  }
  double mix_sum = 0.0;
  for (double w : attack_mix) {
    if (!(w >= 0.0)) fail(ErrorCode::kInvalidArgument, "attack_mix weights must be >= 0");
    mix_sum += w;
  }
  if (std::fabs(mix_sum - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidArgument, "attack_mix must sum to 1");
  }
  quant.validate();
  if (dlog_table_bound < 1) {
    fail(ErrorCode::kInvalidArgument, "dlog_table_bound must be >= 1");
  }
  if (epoch.empty() || epoch.find('|') != std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "epoch must be non-empty without '|'");
  }
  if (model.kind == ModelSource::Kind::kTrain) {
    if (d != slots_per_day) {
      fail(ErrorCode::kInvalidArgument,
           "a trained model needs d == slots_per_day (one day per record)");
    }
    if (model.train_days < 1) {
      fail(ErrorCode::kInvalidArgument, "train_days must be >= 1");
    }
    arch_preset(model.arch, d).check_first_layer();
  } else if (model.path.empty()) {
    fail(ErrorCode::kInvalidArgument, "model source 'load' needs a path");
  }
}

void Confusion::add(Label truth, Label predicted) {
  const bool t = truth == Label::kFraudulent;
  const bool p = predicted == Label::kFraudulent;
  if (t && p) ++tp;
  else if (!t && p) ++fp;
  else if (!t && !p) ++tn;
  else ++fn;
}

double Ratio::value() const {
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<std::string> Ratio::fixed6() const {
  if (den == 0) return std::nullopt;
  i128 n = num;
  i128 dd = den;
  if (dd < 0) {
    n = -n;
    dd = -dd;
  }
  const bool neg = n < 0;
  if (neg) n = -n;
  const i128 scaled = n * 1000000;
  i128 q = scaled / dd;
  const i128 r = scaled % dd;
  if (2 * r > dd || (2 * r == dd && (q & 1) != 0)) ++q;
  const auto whole = static_cast<long long>(q / 1000000);
  const auto frac = static_cast<long long>(q % 1000000);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", (neg && q != 0) ? "-" : "",
                whole, frac);
  return std::string(buf);
}

Metrics metrics(const Confusion& c) {
  const auto tp = static_cast<std::int64_t>(c.tp);
  const auto fp = static_cast<std::int64_t>(c.fp);
  const auto tn = static_cast<std::int64_t>(c.tn);
  const auto fn = static_cast<std::int64_t>(c.fn);
  Metrics m;
  m.dr = make_ratio(tp, tp + fp);
  m.fa = make_ratio(fp, tn + fp);
  if (m.dr.defined() && m.fa.defined()) {
    m.hd = make_ratio(tp * (tn + fp) - fp * (tp + fp), (tp + fp) * (tn + fp));
  }
  m.accuracy = make_ratio(tp + tn, tp + fp + tn + fn);
  m.recall = make_ratio(tp, tp + fn);
  return m;
}

model::Architecture arch_preset(const std::string& name, std::size_t d) {
  if (name == "desk") return model::Architecture::desk(d);
  if (name == "table3") {
    if (d != 48) {
      fail(ErrorCode::kShapeMismatch, "the table3 preset expects d = 48");
    }
    return model::Architecture::table3();
  }
  fail(ErrorCode::kInvalidArgument, "unknown architecture preset '" + name + "'");
}

// --- training -----------------------------------------------------------------

StudyResult train_and_score(const std::vector<attacks::DailyRecord>& records,
                            const model::Architecture& arch,
                            const model::TrainParams& hp,
                            const quantize::QuantScheme& quant,
                            double train_ratio, std::uint64_t seed) {
  auto [train_side, test_side] = data::split(records, train_ratio, seed);
  // Balance each side on its own so no duplicated record straddles the split.
  const auto train_set = data::balance(train_side);
  const auto test_set = data::balance(test_side);

  StudyResult out;
  out.model = model::train(train_set, arch, hp, quant);
  const auto split = model::split_first_layer(out.model);
  out.summary.train_records = train_set.size();
  out.summary.test_records = test_set.size();
  std::size_t fraud = 0;
  for (const auto& rec : test_set) {
    const auto r_q = quantize::quantize_readings(rec.readings, quant);
    const auto pred = model::infer_quantized(out.model, split, r_q);
    out.summary.test.add(rec.label, pred.label);
    if (rec.label == Label::kFraudulent) ++fraud;
  }
  const std::size_t majority = std::max(fraud, test_set.size() - fraud);
  out.baseline_accuracy =
      static_cast<double>(majority) / static_cast<double>(test_set.size());
  return out;
}

StudyResult run_study(const StudyConfig& cfg) {
  if (cfg.meters < 1 || cfg.days < 1) {
    fail(ErrorCode::kInvalidArgument, "study needs at least one meter-day");
  }
  const auto profiles = fleet_profiles(cfg.meters, cfg.seed);
  std::vector<attacks::DailyRecord> honest;
  for (const auto& p : profiles) {
    auto days = data::gen_honest_days(p, cfg.days, cfg.quant.max_kwh(), cfg.slots);
    honest.insert(honest.end(), days.begin(), days.end());
  }
  Rng rng = Rng(cfg.seed).fork(2);
  const auto all = attacks::expand_dataset(honest, rng);
  return train_and_score(all, cfg.arch, cfg.train, cfg.quant, cfg.train_ratio,
                         splitmix64(cfg.seed));
}

// --- scenario -----------------------------------------------------------------

SimReport run_scenario(const ScenarioConfig& cfg, SimArtifacts* artifacts) {
  cfg.validate();
  if (cfg.model.kind == ModelSource::Kind::kLoad) {
    return run_scenario(cfg, io::read_model(cfg.model.path), artifacts);
  }
  // Training days come after the scenario days and use a separate noise
  // stream, so the model never sees the readings it later scores.
  auto profiles = fleet_profiles(cfg.num_meters, cfg.seed);
  std::vector<attacks::DailyRecord> honest;
  for (auto p : profiles) {
    p.seed = splitmix64(p.seed ^ 0x7261696eULL);
    auto days = data::gen_honest_days(p, cfg.model.train_days, cfg.quant.max_kwh(),
                                      cfg.slots_per_day,
                                      static_cast<std::uint32_t>(cfg.days));
    honest.insert(honest.end(), days.begin(), days.end());
  }
  Rng rng = Rng(cfg.seed).fork(5);
  const auto corpus = attacks::expand_dataset(honest, rng);
  auto study = train_and_score(corpus, arch_preset(cfg.model.arch, cfg.d),
                               cfg.model.train, cfg.quant, 0.8,
                               splitmix64(cfg.seed ^ 0x73706c6974ULL));
  SimReport report = run_scenario(cfg, study.model, artifacts);
  report.training = study.summary;
  return report;
}

SimReport run_scenario(const ScenarioConfig& cfg, const model::ModelWeights& m,
                       SimArtifacts* artifacts) {
  cfg.validate();
  m.validate();
  m.arch.check_first_layer();
  if (m.arch.input_size() != cfg.d) {
    fail(ErrorCode::kShapeMismatch, "model input width must equal d");
  }
  if (!(m.quant == cfg.quant)) {
    fail(ErrorCode::kKeyModelMismatch,
         "model quantization scheme differs from the scenario's");
  }
  const auto& q = cfg.quant;
  const std::size_t n = cfg.num_meters;
  const std::size_t T = cfg.total_slots();
  const auto split = model::split_first_layer(m);
  const auto rates_q = quantize::quantize_rates(cfg.rates, q);
  std::int64_t max_rate = 0;
  for (auto r : rates_q) max_rate = std::max(max_rate, r < 0 ? -r : r);

  // Bounds first: a misconfigured scale fails before any key is made.
  const std::uint64_t reach = std::max(
      {quantize::dlog_bound_for(quantize::Purpose::kMonitoring, n, 1, q),
       quantize::dlog_bound_for(quantize::Purpose::kBilling, cfg.b, max_rate, q),
       quantize::dlog_bound_for(quantize::Purpose::kDetection, cfg.d,
                                split.max_abs, q)});
  const auto table = group::DlogTable::build(std::min(cfg.dlog_table_bound, reach),
                                             reach);

  SimReport report;
  report.config = cfg;
  report.weight_digest = split.digest;
  report.weight_max_abs = split.max_abs;

  // Fleet behaviour.
  const auto profiles = fleet_profiles(n, cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng pick = Rng(cfg.seed).fork(2);
  pick.shuffle(order);
  const auto n_fraud = static_cast<std::size_t>(
      std::llround(cfg.fraud_fraction * static_cast<double>(n)));
  std::vector<std::optional<Attack>> tamper(n);
  for (std::size_t k = 0; k < n_fraud; ++k) {
    tamper[order[k]] = pick_attack(pick, cfg.attack_mix);
  }

  std::vector<attacks::DailyRecord> records;
  records.reserve(n * cfg.days);
  std::vector<std::vector<std::int64_t>> stream(n);  // meter -> T readings
  for (std::size_t i = 0; i < n; ++i) {
    Rng meter_rng = Rng(cfg.seed).fork(1000 + i);
    auto days = data::gen_honest_days(profiles[i], cfg.days, q.max_kwh(),
                                      cfg.slots_per_day);
    for (auto& day : days) {
      if (tamper[i]) {
        // The tampered meter rewrites the plaintext before it encrypts.
        const auto params = attacks::sample_params(meter_rng, cfg.slots_per_day);
        day = attacks::apply_attack(day, *tamper[i], params);
      }
      auto r_q = quantize::quantize_readings(day.readings, q);
      stream[i].insert(stream[i].end(), r_q.begin(), r_q.end());
      records.push_back(std::move(day));
      if (artifacts != nullptr) artifacts->readings_q.push_back(std::move(r_q));
    }
  }

  // KDC.
  SeededEntropy entropy(cfg.seed, "etdfe-sim-keys");
  const auto keys = fe::keygen(n, entropy);
  const auto mk = fe::derive_monitoring_key(keys);

  std::vector<fe::SlotLabel> labels(T);
  std::vector<group::GroupPair> basis;
  basis.reserve(T);
  for (std::size_t g = 0; g < T; ++g) {
    labels[g] = fe::SlotLabel{cfg.epoch, g + 1};
    basis.push_back(group::hash_to_group_pair(labels[g].bytes()));
  }

  // Meters. One ciphertext per (meter, slot); the set guards label reuse.
  std::vector<double> t_encrypt;
  t_encrypt.reserve(n * T);
  std::set<std::pair<MeterId, fe::SlotLabel>> used;
  std::vector<std::vector<fe::Ciphertext>> cts(n);
  for (std::size_t i = 0; i < n; ++i) {
    cts[i].reserve(T);
    for (std::size_t g = 0; g < T; ++g) {
      if (!used.emplace(keys[i].meter_id, labels[g]).second) {
        fail(ErrorCode::kSlotReuse, "slot " + labels[g].bytes() +
                                        " already used by meter " +
                                        std::to_string(keys[i].meter_id));
      }
      const auto start = Clock::now();
      cts[i].push_back(fe::encrypt(keys[i], labels[g], basis[g], stream[i][g],
                                   q.reading_max));
      t_encrypt.push_back(micros_since(start));
    }
  }

  // Operator: monitoring.
  std::vector<double> t_aggregate;
  std::vector<fe::Ciphertext> column(n);
  for (std::size_t g = 0; g < T; ++g) {
    std::int64_t expect = 0;
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = cts[i][g];
      expect += stream[i][g];
    }
    const auto start = Clock::now();
    const std::int64_t total = fe::aggregate_decrypt(column, mk, table);
    t_aggregate.push_back(micros_since(start));
    oracle_check(total == expect, "aggregate for slot " + labels[g].bytes());
    report.slots.push_back(SlotTotal{
        labels[g], total,
        quantize::dequantize_inner(total, q, quantize::Purpose::kMonitoring)});
  }

  // Operator: billing.
  std::vector<double> t_billing;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < T / cfg.b; ++p) {
      const auto slots = period_labels(labels, p * cfg.b, cfg.b);
      const auto bk = fe::derive_billing_key(keys[i], rates_q, slots);
      const std::span<const fe::Ciphertext> part(cts[i].data() + p * cfg.b, cfg.b);
      const auto start = Clock::now();
      const std::int64_t amount = fe::billing_decrypt(part, bk, table);
      t_billing.push_back(micros_since(start));
      std::int64_t expect = 0;
      for (std::size_t t = 0; t < cfg.b; ++t) {
        expect += rates_q[t] * stream[i][p * cfg.b + t];
      }
      oracle_check(amount == expect, "bill for meter " +
                                         std::to_string(keys[i].meter_id) +
                                         " period " + std::to_string(p));
      report.bills.push_back(Bill{
          keys[i].meter_id, p, amount,
          quantize::dequantize_inner(amount, q, quantize::Purpose::kBilling)});
    }
  }

  // Operator: detection.
  std::vector<double> t_detect;
  std::vector<std::int32_t> window(cfg.d);
  std::vector<std::int64_t> expect(split.w_q.cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < T / cfg.d; ++p) {
      const auto slots = period_labels(labels, p * cfg.d, cfg.d);
      const auto dks = fe::derive_detection_keys(keys[i], split.w_q, slots);
      const std::span<const fe::Ciphertext> part(cts[i].data() + p * cfg.d, cfg.d);
      const auto start = Clock::now();
      const auto z = fe::detection_decrypt(part, dks, split.w_q, table);
      const auto pred = model::infer_from_first_layer(m, z);
      t_detect.push_back(micros_since(start) / 1000.0);
      for (std::size_t t = 0; t < cfg.d; ++t) {
        window[t] = static_cast<std::int32_t>(stream[i][p * cfg.d + t]);
      }
      kernels::vec_mat_i32(window, split.w_q.data, split.w_q.cols, expect);
      oracle_check(z == expect, "first-layer outputs for meter " +
                                    std::to_string(keys[i].meter_id) +
                                    " period " + std::to_string(p));
      Verdict v;
      v.meter_id = keys[i].meter_id;
      v.period = p;
      v.truth = tamper[i] ? Label::kFraudulent : Label::kHonest;
      v.attack = tamper[i];
      v.predicted = pred.label;
      v.p_fraud = pred.probs[1];
      report.confusion.add(v.truth, v.predicted);
      report.verdicts.push_back(v);
    }
  }

  if (cfg.measure_overhead) {
    report.overhead = Overhead{median(t_encrypt), median(t_aggregate),
                               median(t_billing), median(t_detect),
                               group::kPointBytes};
  }
  if (artifacts != nullptr) {
    artifacts->model = m;
    artifacts->records = std::move(records);
    artifacts->keys = keys;
    artifacts->ciphertexts.clear();
    for (auto& row : cts) {
      artifacts->ciphertexts.insert(artifacts->ciphertexts.end(), row.begin(),
                                    row.end());
    }
  }
  return report;
}

// --- bench --------------------------------------------------------------------

BenchResult bench(const ScenarioConfig& cfg, const model::ModelWeights& m,
                  std::size_t reps) {
  cfg.validate();
  m.validate();
  if (reps < 1) fail(ErrorCode::kInvalidArgument, "reps must be >= 1");
  const auto& q = cfg.quant;
  const std::size_t n = cfg.num_meters;
  const auto split = model::split_first_layer(m);
  const auto rates_q = quantize::quantize_rates(cfg.rates, q);
  std::int64_t max_rate = 0;
  for (auto r : rates_q) max_rate = std::max(max_rate, r < 0 ? -r : r);
  const std::uint64_t reach = std::max(
      {quantize::dlog_bound_for(quantize::Purpose::kMonitoring, n, 1, q),
       quantize::dlog_bound_for(quantize::Purpose::kBilling, cfg.b, max_rate, q),
       quantize::dlog_bound_for(quantize::Purpose::kDetection, m.arch.input_size(),
                                split.max_abs, q)});
  const auto table = group::DlogTable::build(std::min(cfg.dlog_table_bound, reach),
                                             reach);
  SeededEntropy entropy(cfg.seed, "etdfe-bench-keys");
  const auto keys = fe::keygen(n, entropy);
  const auto mk = fe::derive_monitoring_key(keys);
  Rng rng(cfg.seed);
  const std::size_t d = m.arch.input_size();
  const std::size_t span_len = std::max(cfg.b, d);

  std::uint64_t next_index = 1;
  auto fresh_labels = [&](std::size_t count) {
    std::vector<fe::SlotLabel> out;
    for (std::size_t k = 0; k < count; ++k) {
      out.push_back(fe::SlotLabel{cfg.epoch + "-bench", next_index++});
    }
    return out;
  };
  auto reading = [&] { return rng.uniform_int(0, 200); };

  BenchResult res;
  res.reps = reps;
  res.meters = n;
  res.neurons = split.w_q.cols;
  std::vector<double> t_enc;
  std::vector<double> t_agg;
  std::vector<double> t_bill;
  std::vector<double> t_det;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    // Encryption of one reading, including hashing the slot label.
    const auto label = fresh_labels(1).front();
    auto start = Clock::now();
    const auto ct = fe::encrypt(keys[0], label, reading(), q.reading_max);
    t_enc.push_back(micros_since(start));

    // Fleet-wide aggregation for one slot.
    const auto slot = fresh_labels(1).front();
    const auto basis = group::hash_to_group_pair(slot.bytes());
    std::vector<fe::Ciphertext> column;
    for (const auto& key : keys) {
      column.push_back(fe::encrypt(key, slot, basis, reading(), q.reading_max));
    }
    start = Clock::now();
    (void)fe::aggregate_decrypt(column, mk, table);
    t_agg.push_back(micros_since(start));

    // One meter's billing period and detection record.
    const auto slots = fresh_labels(span_len);
    std::vector<fe::Ciphertext> series;
    for (const auto& s : slots) {
      series.push_back(fe::encrypt(keys[0], s, reading(), q.reading_max));
    }
    const auto bk = fe::derive_billing_key(
        keys[0], rates_q, std::span<const fe::SlotLabel>(slots.data(), cfg.b));
    start = Clock::now();
    (void)fe::billing_decrypt(std::span<const fe::Ciphertext>(series.data(), cfg.b),
                              bk, table);
    t_bill.push_back(micros_since(start));

    const auto dks = fe::derive_detection_keys(
        keys[0], split.w_q, std::span<const fe::SlotLabel>(slots.data(), d));
    start = Clock::now();
    const auto z = fe::detection_decrypt(
        std::span<const fe::Ciphertext>(series.data(), d), dks, split.w_q, table);
    (void)model::infer_from_first_layer(m, z);
    t_det.push_back(micros_since(start) / 1000.0);
  }
  res.overhead = Overhead{median(t_enc), median(t_agg), median(t_bill),
                          median(t_det), group::kPointBytes};
  return res;
}

}  // namespace etdfe::sim
