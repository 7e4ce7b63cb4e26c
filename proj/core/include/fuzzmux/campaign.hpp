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

// Campaign assembly: turns a validated config into a running ensemble.
// Owns the output-directory layout, wires fuzzers to monitors to the
// scheduler, persists progress after every round, and resumes from a
// previous run of the same directory when one is found.
//
// Output directory layout:
//
//   config_used.json   effective config, after env overrides
//   rounds.jsonl       one JSON object per finished round
//   coverage.csv       cpu_seconds,fuzzer,count,density rows
//   state.json         scheduler state for resume (theta, rounds, cpu)
//   seed_index.tsv     hash/origin/round/size ledger of distinct seeds
//   bitmaps/<f>.bitmap   per-fuzzer accumulated coverage, map_size bytes
//   processed/<f>.tsv    per-fuzzer ledger of executed corpus files
//   fuzzers/<name>/      per-fuzzer working tree (queue, crashes, hangs,
//                        sync, instance outputs)

#ifndef FUZZMUX_CAMPAIGN_HPP_
#define FUZZMUX_CAMPAIGN_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fuzzmux/config.hpp"
#include "fuzzmux/environment.hpp"
#include "fuzzmux/scheduler.hpp"
#include "fuzzmux/seed_sync.hpp"
#include "fuzzmux/sim.hpp"
#include "fuzzmux/telemetry.hpp"

namespace fuzzmux {

struct CampaignPaths {
  std::filesystem::path root;

  std::filesystem::path config_used() const { return root / "config_used.json"; }
  std::filesystem::path rounds() const { return root / "rounds.jsonl"; }
  std::filesystem::path coverage() const { return root / "coverage.csv"; }
  std::filesystem::path state() const { return root / "state.json"; }
  std::filesystem::path seed_index() const { return root / "seed_index.tsv"; }
  std::filesystem::path bitmaps() const { return root / "bitmaps"; }
  std::filesystem::path processed() const { return root / "processed"; }
  std::filesystem::path fuzzers() const { return root / "fuzzers"; }
  std::filesystem::path bitmap_for(const std::string& name) const {
    return bitmaps() / (name + ".bitmap");
  }
  std::filesystem::path ledger_for(const std::string& name) const {
    return processed() / (name + ".tsv");
  }
};

// A fully wired campaign. Construction builds the rigs and, when the output
// directory already holds a state.json, reloads every piece of persistent
// state; run() then continues where the budget left off.
class Campaign {
 public:
  explicit Campaign(CampaignConfig config);
  ~Campaign();

  Campaign(const Campaign&) = delete;
  Campaign& operator=(const Campaign&) = delete;

  bool resumed() const { return resumed_; }
  const CampaignPaths& paths() const { return paths_; }
  Scheduler& scheduler() { return *scheduler_; }
  Environment& environment() { return *env_; }
  std::span<FuzzerRig> rigs() { return rigs_; }

  CampaignStats run();

 private:
  void build_sim_rigs();
  void build_exec_rigs();
  void persist_round(const RoundRecord& record);
  void write_state();

  CampaignConfig config_;
  CampaignPaths paths_;
  bool resumed_ = false;

  Scenario scenario_;  // sim mode; referenced by fuzzers and oracles
  std::vector<std::unique_ptr<ExecutionOracle>> oracles_;
  std::vector<FuzzerRig> rigs_;
  std::unique_ptr<ResourceLimiter> limiter_;
  std::unique_ptr<Environment> env_;
  std::unique_ptr<SeedSyncer> syncer_;
  std::unique_ptr<TelemetryWriter> telemetry_;
  std::unique_ptr<Scheduler> scheduler_;
};

// Convenience wrapper for the CLI: validate, build, run, map the outcome to
// a process exit code (0 budget exhausted, 1 aborted mid-run).
int run_campaign_command(CampaignConfig config);

}  // namespace fuzzmux

#endif  // FUZZMUX_CAMPAIGN_HPP_
