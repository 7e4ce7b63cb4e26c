// Copyright 2026 The fuzzmux Authors.
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

#include "fuzzmux/campaign.hpp"

#include <map>

#include <json.hpp>

#include "fuzzmux/log.hpp"
#include "fuzzmux/oracle.hpp"
#include "fuzzmux/process_fuzzer.hpp"
#include "fuzzmux/sim_fuzzer.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

using ordered_json = nlohmann::ordered_json;

namespace {

struct SavedState {
  double theta = 0.0;
  int rounds_done = 0;
  double elapsed_cpu = 0.0;
  std::map<std::string, double> fuzzer_cpu;
};

SavedState read_state_file(const std::filesystem::path& path) {
  SavedState s;
  try {
    const ordered_json j = ordered_json::parse(read_file(path));
    s.theta = j.at("theta").get<double>();
    s.rounds_done = j.at("rounds_done").get<int>();
    s.elapsed_cpu = j.at("elapsed_cpu").get<double>();
    if (j.contains("fuzzer_cpu")) {
      for (const auto& [name, v] : j.at("fuzzer_cpu").items()) {
        s.fuzzer_cpu[name] = v.get<double>();
      }
    }
  } catch (const std::exception& e) {
    throw Error("unreadable state file " + path.string() + ": " + e.what());
  }
  return s;
}

}  // namespace

Campaign::Campaign(CampaignConfig config) : config_(std::move(config)) {
  validate_config(config_);
  paths_.root = config_.output_dir;
  std::filesystem::create_directories(paths_.root);
  std::filesystem::create_directories(paths_.bitmaps());
  std::filesystem::create_directories(paths_.processed());
  std::filesystem::create_directories(paths_.fuzzers());

  resumed_ = std::filesystem::exists(paths_.state());
  SavedState saved;
  if (resumed_) {
    saved = read_state_file(paths_.state());
    log_info("resuming campaign: {} rounds done, {:.0f} cpu-seconds elapsed",
             saved.rounds_done, saved.elapsed_cpu);
  }

  if (config_.mode == CampaignMode::kSim) {
    build_sim_rigs();
  } else {
    build_exec_rigs();
  }

  if (resumed_) {
    for (FuzzerRig& rig : rigs_) {
      const auto ledger = paths_.ledger_for(rig.fuzzer->name());
      const auto bitmap = paths_.bitmap_for(rig.fuzzer->name());
      if (std::filesystem::exists(ledger) &&
          std::filesystem::exists(bitmap)) {
        rig.monitor->load_state(ledger, bitmap);
      }
      // Per-fuzzer CPU counters feed phase deltas in the round records; they
      // must carry over or the subtraction rounds differently after resume.
      const auto it = saved.fuzzer_cpu.find(rig.fuzzer->name());
      if (it != saved.fuzzer_cpu.end()) {
        rig.fuzzer->restore_cpu(it->second);
      }
    }
  }

  syncer_ = std::make_unique<SeedSyncer>(paths_.seed_index());
  if (resumed_) syncer_->load_index();

  if (config_.mode == CampaignMode::kSim) {
    env_ = std::make_unique<SimEnvironment>(
        rigs_, config_.schedule.total_cpu_budget, saved.elapsed_cpu);
  } else {
    if (!config_.cgroup_root.empty()) {
      limiter_ = std::make_unique<CgroupLimiter>(config_.cgroup_root);
    }
    env_ = std::make_unique<RealEnvironment>(
        rigs_, limiter_.get(), saved.elapsed_cpu, config_.poll_interval_ms);
  }

  telemetry_ = std::make_unique<TelemetryWriter>(paths_.root);
  scheduler_ = std::make_unique<Scheduler>(config_.schedule, rigs_, *env_,
                                           *syncer_);
  if (resumed_) {
    scheduler_->restore({saved.theta, saved.rounds_done});
  }

  scheduler_->set_round_sink(
      [this](const RoundRecord& record) { persist_round(record); });
  scheduler_->set_coverage_sink([this](double cpu, const std::string& fuzzer,
                                       std::uint64_t count, double density) {
    telemetry_->append_coverage(cpu, fuzzer, count, density);
  });

  write_file_atomic(paths_.config_used(), config_to_json(config_));
}

Campaign::~Campaign() = default;

void Campaign::build_sim_rigs() {
  scenario_ = load_scenario(config_.scenario);
  for (std::size_t i = 0; i < scenario_.profiles.size(); ++i) {
    FuzzerSpec spec;
    spec.name = scenario_.profiles[i].name;
    auto fuzzer = std::make_unique<SimFuzzer>(
        spec, paths_.fuzzers() / spec.name, scenario_, i, config_.rng_seed);
    auto oracle = std::make_unique<SimOracle>(scenario_.universe);
    auto monitor = std::make_unique<CorpusMonitor>(*fuzzer, *oracle);
    oracles_.push_back(std::move(oracle));
    rigs_.push_back({std::move(fuzzer), std::move(monitor)});
  }
}

void Campaign::build_exec_rigs() {
  std::filesystem::path corpus = config_.corpus_dir;
  if (corpus.empty()) {
    corpus = paths_.root / "corpus";
    std::filesystem::create_directories(corpus);
  }

  InstrumentedTarget target = config_.target;
  auto oracle = std::make_unique<InstrumentedBinaryOracle>(std::move(target));
  ExecutionOracle& oracle_ref = *oracle;
  oracles_.push_back(std::move(oracle));

  for (const FuzzerSpec& spec : config_.fuzzers) {
    ProcessFuzzerOptions options;
    options.target = config_.target.binary;
    options.input_dir = corpus;
    options.stop_grace_seconds = config_.stop_grace_seconds;
    auto fuzzer = std::make_unique<ProcessFuzzer>(
        spec, paths_.fuzzers() / spec.name, options);
    auto monitor = std::make_unique<CorpusMonitor>(*fuzzer, oracle_ref);
    rigs_.push_back({std::move(fuzzer), std::move(monitor)});
  }
}

void Campaign::write_state() {
  const SchedulerState& s = scheduler_->state();
  ordered_json j;
  j["theta"] = s.theta_cur;
  j["rounds_done"] = s.rounds_done;
  j["elapsed_cpu"] = env_->now_cpu();
  ordered_json per_fuzzer = ordered_json::object();
  for (const FuzzerRig& rig : rigs_) {
    per_fuzzer[rig.fuzzer->name()] = rig.fuzzer->cpu_time_consumed();
  }
  j["fuzzer_cpu"] = std::move(per_fuzzer);
  write_file_atomic(paths_.state(), j.dump(2) + "\n");
}

void Campaign::persist_round(const RoundRecord& record) {
  telemetry_->append_round(record);
  for (const FuzzerRig& rig : rigs_) {
    rig.monitor->save_state(paths_.ledger_for(rig.fuzzer->name()),
                            paths_.bitmap_for(rig.fuzzer->name()));
  }
  write_state();
}

CampaignStats Campaign::run() {
  CampaignStats stats = scheduler_->run_campaign();
  // Final flush so budget-exhausted-on-arrival runs also leave fresh state.
  for (const FuzzerRig& rig : rigs_) {
    rig.monitor->save_state(paths_.ledger_for(rig.fuzzer->name()),
                            paths_.bitmap_for(rig.fuzzer->name()));
  }
  write_state();
  return stats;
}

int run_campaign_command(CampaignConfig config) {
  validate_config(config);
  Campaign campaign(std::move(config));
  const CampaignStats stats = campaign.run();
  log_info("campaign finished: {} rounds, {:.0f} cpu-seconds{}", stats.rounds,
           stats.cpu_consumed, stats.aborted ? ", aborted" : "");
  return stats.aborted ? 1 : 0;
}

}  // namespace fuzzmux
