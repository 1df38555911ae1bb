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

// etdfe: command-line front end for keys, data, training, simulation,
// bench and verification.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "etdfe/attacks.hpp"
#include "etdfe/data.hpp"
#include "etdfe/dlog.hpp"
#include "etdfe/error.hpp"
#include "etdfe/fe.hpp"
#include "etdfe/io.hpp"
#include "etdfe/kernels.hpp"
#include "etdfe/model.hpp"
#include "etdfe/random.hpp"
#include "etdfe/sim.hpp"

namespace fs = std::filesystem;
using namespace etdfe;

namespace {

bool g_json_errors = false;

int report_error(const std::string& code, const std::string& message) {
  if (g_json_errors) {
    nlohmann::ordered_json j;
    j["error"] = code;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "etdfe: " << message << "\n";
  }
  return 1;
}

void refuse_existing(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) {
    fail(ErrorCode::kRefuseOverwrite,
         path.string() + " exists (pass --force to replace it)");
  }
}

// A config file, or a report whose embedded config is used.
sim::ScenarioConfig load_config(const fs::path& path) {
  const auto text = io::read_file(path);
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_object() && j.value("format", "") == "etdfe-report/1") {
    return io::config_from_json(j.at("config").dump(), path.parent_path());
  }
  return io::config_from_json(text, path.parent_path());
}

std::vector<fe::Ciphertext> meter_period(const std::vector<fe::Ciphertext>& all,
                                         fe::MeterId meter, std::size_t first,
                                         std::size_t len) {
  std::vector<fe::Ciphertext> out;
  for (const auto& ct : all) {
    if (ct.meter_id == meter && ct.slot.index > first && ct.slot.index <= first + len) {
      out.push_back(ct);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.slot < b.slot; });
  if (out.size() != len) {
    fail(ErrorCode::kIncompleteSlot,
         "meter " + std::to_string(meter) + " has " + std::to_string(out.size()) +
             " of " + std::to_string(len) + " ciphertexts for the period");
  }
  return out;
}

std::vector<fe::SlotLabel> labels_of(const std::vector<fe::Ciphertext>& cts) {
  std::vector<fe::SlotLabel> out;
  for (const auto& ct : cts) out.push_back(ct.slot);
  return out;
}

std::string fmt(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ETDFE: functional encryption for smart-meter monitoring, "
               "billing and theft detection"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json_errors, "Print errors as JSON objects on stderr");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Create meter keys and the monitoring key");
  std::size_t kg_meters = 0;
  fs::path kg_out;
  bool kg_force = false;
  std::optional<std::uint64_t> kg_seed;
  keygen->add_option("--meters", kg_meters, "Number of meters")->required();
  keygen->add_option("--out", kg_out, "Output directory")->required();
  keygen->add_flag("--force", kg_force, "Replace existing key files");
  keygen->add_option("--seed", kg_seed, "Deterministic keys (testing only)");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate synthetic honest readings");
  std::size_t gd_meters = 10;
  std::size_t gd_days = 30;
  std::uint64_t gd_seed = 1;
  fs::path gd_out;
  bool gd_force = false;
  gen->add_option("--meters", gd_meters, "Number of meters")->check(CLI::PositiveNumber);
  gen->add_option("--days", gd_days, "Days per meter")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gd_seed, "Generator seed");
  gen->add_option("--out", gd_out, "Output CSV")->required();
  gen->add_flag("--force", gd_force, "Replace an existing file");

  // attack
  auto* atk = app.add_subcommand("attack", "Expand honest records with attacks f1..f6");
  fs::path at_in;
  fs::path at_out;
  std::uint64_t at_seed = 1;
  bool at_force = false;
  atk->add_option("--in", at_in, "Honest CSV")->required()->check(CLI::ExistingFile);
  atk->add_option("--out", at_out, "Labelled CSV")->required();
  atk->add_option("--seed", at_seed, "Attack parameter seed");
  atk->add_flag("--force", at_force, "Replace an existing file");

  // train
  auto* trn = app.add_subcommand("train", "Train the detector on a labelled CSV");
  fs::path tr_data;
  fs::path tr_out;
  std::string tr_arch = "desk";
  model::TrainParams hp;
  double tr_ratio = 0.8;
  bool tr_force = false;
  trn->add_option("--data", tr_data, "Labelled CSV")->required()->check(CLI::ExistingFile);
  trn->add_option("--out", tr_out, "Model weights file")->required();
  trn->add_option("--arch", tr_arch, "Architecture preset")
      ->check(CLI::IsMember({"desk", "table3"}));
  trn->add_option("--epochs", hp.epochs, "Epochs");
  trn->add_option("--batch", hp.batch, "Mini-batch size");
  trn->add_option("--lr", hp.lr, "Adam learning rate");
  trn->add_option("--l2", hp.l2, "L2 penalty");
  trn->add_option("--seed", hp.seed, "Initialisation and shuffling seed");
  trn->add_option("--train-ratio", tr_ratio, "Share of each class used for training");
  trn->add_flag("--force", tr_force, "Replace an existing file");

  // simulate
  auto* simc = app.add_subcommand("simulate", "Run a full scenario");
  fs::path sm_config;
  fs::path sm_out;
  fs::path sm_data;
  std::optional<std::uint64_t> sm_seed;
  bool sm_force = false;
  simc->add_option("--config", sm_config, "Scenario config")->required()->check(CLI::ExistingFile);
  simc->add_option("--out", sm_out, "Report file")->required();
  simc->add_option("--data-dir", sm_data, "Write keys, ciphertexts and plaintext logs here");
  simc->add_option("--seed", sm_seed, "Override the config seed");
  simc->add_flag("--force", sm_force, "Replace existing outputs");

  // bill
  auto* bill = app.add_subcommand("bill", "Decrypt one meter's bill for a period");
  fs::path bl_config;
  fs::path bl_data;
  fe::MeterId bl_meter = 0;
  std::size_t bl_period = 0;
  bill->add_option("--config", bl_config, "Scenario config or report")->required()->check(CLI::ExistingFile);
  bill->add_option("--data", bl_data, "Simulation data directory")->required()->check(CLI::ExistingDirectory);
  bill->add_option("--meter", bl_meter, "Meter id")->required();
  bill->add_option("--period", bl_period, "Billing period, from 0");

  // detect
  auto* det = app.add_subcommand("detect", "Evaluate the detector on one encrypted period");
  fs::path dt_config;
  fs::path dt_data;
  fe::MeterId dt_meter = 0;
  std::size_t dt_period = 0;
  det->add_option("--config", dt_config, "Scenario config or report")->required()->check(CLI::ExistingFile);
  det->add_option("--data", dt_data, "Simulation data directory")->required()->check(CLI::ExistingDirectory);
  det->add_option("--meter", dt_meter, "Meter id")->required();
  det->add_option("--period", dt_period, "Detection period, from 0");

  // bench
  auto* bch = app.add_subcommand("bench", "Time encryption, aggregation, billing and detection");
  fs::path bc_config;
  fs::path bc_model;
  std::size_t bc_reps = 20;
  std::size_t bc_meters = 200;
  bch->add_option("--config", bc_config, "Scenario config (defaults otherwise)")->check(CLI::ExistingFile);
  bch->add_option("--model", bc_model, "Model weights (random init otherwise)")->check(CLI::ExistingFile);
  bch->add_option("--reps", bc_reps, "Repetitions per measurement")->check(CLI::PositiveNumber);
  bch->add_option("--meters", bc_meters, "Fleet size when no config is given")->check(CLI::Range(2, 100000));

  // verify
  auto* ver = app.add_subcommand("verify", "Replay the plaintext oracle against a report");
  fs::path vf_report;
  fs::path vf_data;
  ver->add_option("--report", vf_report, "Report file")->required()->check(CLI::ExistingFile);
  ver->add_option("--data", vf_data, "Simulation data directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (g_json_errors && e.get_exit_code() != 0) {
      report_error("UsageError", e.what());
      std::cerr << app.help();
      return e.get_exit_code();
    }
    return app.exit(e);
  }

  try {
    if (*keygen) {
      if (kg_meters < 2) {
        fail(ErrorCode::kTooFewMeters, "need at least two meters, got " +
                                           std::to_string(kg_meters));
      }
      for (std::size_t i = 1; i <= kg_meters; ++i) {
        refuse_existing(kg_out / ("meter_" + std::to_string(i) + ".json"), kg_force);
      }
      refuse_existing(kg_out / "monitoring.json", kg_force);
      std::unique_ptr<EntropySource> entropy;
      if (kg_seed) {
        entropy = std::make_unique<SeededEntropy>(*kg_seed, "etdfe-keygen");
      } else {
        entropy = std::make_unique<SystemEntropy>();
      }
      const auto keys = fe::keygen(kg_meters, *entropy);
      for (const auto& key : keys) {
        io::write_file(kg_out / ("meter_" + std::to_string(key.meter_id) + ".json"),
                       io::meter_key_to_json(key), true);
      }
      io::write_file(kg_out / "monitoring.json",
                     io::monitoring_key_to_json(fe::derive_monitoring_key(keys)), true);
      std::cout << "wrote " << keys.size() << " meter keys and monitoring.json to "
                << kg_out.string() << "\n";
    } else if (*gen) {
      refuse_existing(gd_out, gd_force);
      Rng rng = Rng(gd_seed).fork(1);
      std::vector<attacks::DailyRecord> all;
      for (std::size_t i = 1; i <= gd_meters; ++i) {
        const auto p = data::random_profile(rng, static_cast<std::uint32_t>(i));
        auto days = data::gen_honest_days(p, gd_days);
        all.insert(all.end(), days.begin(), days.end());
      }
      std::ostringstream csv;
      data::export_csv(csv, all);
      io::write_file(gd_out, csv.str(), true);
      std::cout << "wrote " << all.size() << " honest records\n";
    } else if (*atk) {
      refuse_existing(at_out, at_force);
      const auto honest = data::ingest_csv(at_in);
      Rng rng(at_seed);
      const auto all = attacks::expand_dataset(honest, rng);
      std::ostringstream csv;
      data::export_csv(csv, all);
      io::write_file(at_out, csv.str(), true);
      std::cout << "wrote " << all.size() << " records (" << honest.size()
                << " honest, " << all.size() - honest.size() << " attacked)\n";
    } else if (*trn) {
      refuse_existing(tr_out, tr_force);
      const auto records = data::ingest_csv(tr_data);
      const auto arch = sim::arch_preset(tr_arch, attacks::kSlotsPerDay);
      const auto res = sim::train_and_score(records, arch, hp, {}, tr_ratio, hp.seed);
      io::write_model(tr_out, res.model, true);
      const auto m = sim::metrics(res.summary.test);
      std::cout << "train records " << res.summary.train_records << ", test records "
                << res.summary.test_records << "\n"
                << "test accuracy " << m.accuracy.fixed6().value_or("null")
                << " (majority baseline " << fmt(res.baseline_accuracy, 6) << ")\n"
                << "test DR " << m.dr.fixed6().value_or("null") << ", FA "
                << m.fa.fixed6().value_or("null") << ", HD "
                << m.hd.fixed6().value_or("null") << "\n";
    } else if (*simc) {
      auto cfg = io::read_config(sm_config);
      if (sm_seed) cfg.seed = *sm_seed;
      refuse_existing(sm_out, sm_force);
      if (!sm_data.empty() && !sm_force && fs::exists(sm_data) &&
          !fs::is_empty(sm_data)) {
        fail(ErrorCode::kRefuseOverwrite,
             sm_data.string() + " is not empty (pass --force to replace it)");
      }
      sim::SimArtifacts artifacts;
      const auto report =
          sim::run_scenario(cfg, sm_data.empty() ? nullptr : &artifacts);
      io::write_file(sm_out, io::report_to_json(report), true);
      if (!sm_data.empty()) io::write_artifacts(sm_data, artifacts, true);
      const auto m = sim::metrics(report.confusion);
      std::cout << "slots " << report.slots.size() << ", bills " << report.bills.size()
                << ", verdicts " << report.verdicts.size()
                << "; all decryptions matched the plaintext oracle\n"
                << "DR " << m.dr.fixed6().value_or("null") << "  FA "
                << m.fa.fixed6().value_or("null") << "  HD "
                << m.hd.fixed6().value_or("null") << "  accuracy "
                << m.accuracy.fixed6().value_or("null") << "\n";
    } else if (*bill) {
      const auto cfg = load_config(bl_config);
      const auto key = io::meter_key_from_json(io::read_file(
          bl_data / "keys" / ("meter_" + std::to_string(bl_meter) + ".json")));
      const auto all = io::ciphertexts_from_jsonl(io::read_file(bl_data / "ciphertexts.jsonl"));
      const auto cts = meter_period(all, bl_meter, bl_period * cfg.b, cfg.b);
      const auto rates_q = quantize::quantize_rates(cfg.rates, cfg.quant);
      std::int64_t max_rate = 1;
      for (auto r : rates_q) max_rate = std::max(max_rate, r < 0 ? -r : r);
      const auto reach = quantize::dlog_bound_for(quantize::Purpose::kBilling, cfg.b,
                                                  max_rate, cfg.quant);
      const auto table = group::DlogTable::build(std::min(reach, cfg.dlog_table_bound), reach);
      const auto bk = fe::derive_billing_key(key, rates_q, labels_of(cts));
      const auto amount = fe::billing_decrypt(cts, bk, table);
      std::cout << "meter " << bl_meter << " period " << bl_period << " bill "
                << io::scaled_decimal(amount, cfg.quant.reading_scale * cfg.quant.rate_scale)
                << "\n";
    } else if (*det) {
      const auto cfg = load_config(dt_config);
      const auto m = io::read_model(dt_data / "model.json");
      const auto split = model::split_first_layer(m);
      const auto key = io::meter_key_from_json(io::read_file(
          dt_data / "keys" / ("meter_" + std::to_string(dt_meter) + ".json")));
      const auto all = io::ciphertexts_from_jsonl(io::read_file(dt_data / "ciphertexts.jsonl"));
      const std::size_t d = m.arch.input_size();
      const auto cts = meter_period(all, dt_meter, dt_period * d, d);
      const auto reach = quantize::dlog_bound_for(quantize::Purpose::kDetection, d,
                                                  split.max_abs, m.quant);
      const auto table = group::DlogTable::build(std::min(reach, cfg.dlog_table_bound), reach);
      const auto dks = fe::derive_detection_keys(key, split.w_q, labels_of(cts));
      const auto z = fe::detection_decrypt(cts, dks, split.w_q, table);
      const auto pred = model::infer_from_first_layer(m, z);
      std::cout << "meter " << dt_meter << " period " << dt_period << " verdict "
                << attacks::label_name(pred.label) << " (p_fraud "
                << fmt(pred.probs[1], 6) << ")\n";
    } else if (*bch) {
      sim::ScenarioConfig cfg;
      if (!bc_config.empty()) {
        cfg = io::read_config(bc_config);
      } else {
        cfg.num_meters = bc_meters;
        cfg.rates.assign(cfg.b, 0.25);
      }
      model::ModelWeights m;
      if (!bc_model.empty()) {
        m = io::read_model(bc_model);
      } else if (cfg.model.kind == sim::ModelSource::Kind::kLoad) {
        m = io::read_model(cfg.model.path);
      } else {
        m = model::ModelWeights::init(sim::arch_preset(cfg.model.arch, cfg.d),
                                      cfg.quant, cfg.model.train.seed);
      }
      const auto res = sim::bench(cfg, m, bc_reps);
      const auto& o = res.overhead;
      std::cout << "kernels: " << kernels::backend_name(kernels::active_backend())
                << "; median of " << res.reps << " runs; " << res.meters
                << " meters; first layer " << m.arch.input_size() << "x" << res.neurons
                << "\n\n"
                << "operation                      this build      reference\n"
                << "encrypt one reading            " << fmt(o.encrypt_us / 1000.0, 4)
                << " ms      0.009 ms\n"
                << "aggregate one slot (fleet)     " << fmt(o.aggregate_us, 1)
                << " us      47.2 us\n"
                << "billing decrypt (one period)   " << fmt(o.billing_us, 1)
                << " us      -\n"
                << "detect one record              " << fmt(o.detect_ms / 1000.0, 4)
                << " s       0.82 s\n"
                << "ciphertext size                " << o.ciphertext_bytes
                << " bytes        40 bytes\n";
    } else if (*ver) {
      const auto checks = io::verify_run(vf_report, vf_data);
      bool ok = true;
      for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        ok = ok && c.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const Error& e) {
    return report_error(std::string(error_code_name(e.code())), e.what());
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what());
  }
  return 0;
}
