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

// Simulated fuzzers and the virtual-clock environment that drives them.
// Everything a real campaign touches (corpus files, sync copies, bitmaps)
// exists on disk here too; only target execution and the passage of time are
// simulated. Campaigns are bit-deterministic for a given (scenario, seed):
// RNG streams are keyed per (campaign seed, fuzzer, round, advance), scans
// are sorted, and no wall-clock value enters any output.

#ifndef FUZZMUX_SIM_FUZZER_HPP_
#define FUZZMUX_SIM_FUZZER_HPP_

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fuzzmux/environment.hpp"
#include "fuzzmux/fuzzer.hpp"
#include "fuzzmux/oracle.hpp"
#include "fuzzmux/sim.hpp"

namespace fuzzmux {

// Decodes simulated seed files into raw hit maps (each covered branch maps
// to one entry with hit count 1). Malformed files report nullopt, standing
// in for a crashing input.
class SimOracle : public ExecutionOracle {
 public:
  explicit SimOracle(const BranchUniverse& universe) : universe_(universe) {}

  std::optional<RawHitMap> execute(const std::filesystem::path& input) override;
  std::size_t map_size() const override { return universe_.map_size; }

 private:
  const BranchUniverse& universe_;
};

class SimFuzzer : public Fuzzer {
 public:
  SimFuzzer(FuzzerSpec spec, std::filesystem::path root_dir,
            const Scenario& scenario, std::size_t profile_index,
            std::uint64_t campaign_seed);

  // Advances this fuzzer's virtual CPU by cpu_seconds, positioned at global
  // clock span [global_from, global_to) of a total_budget campaign. Each
  // undiscovered, unlocked branch is discovered with its Poisson first-
  // arrival probability; finds are written to queue/ as seed files.
  // Returns the number of branches discovered.
  int advance(double cpu_seconds, double global_from, double global_to,
              double total_budget, int round);

  // Imports peer discoveries from sync/ into the visible set, unlocking
  // their children for future discovery. Re-scans the queue too, which makes
  // a resumed campaign reconstruct state from disk.
  void refresh_visible();

  std::uint64_t own_discovered_count() const;

 protected:
  // Lifecycle is pure bookkeeping for a simulated fuzzer.
  void do_start() override {}
  void do_stop() override {}
  void do_pause() override {}
  void do_resume() override {}
  void do_scale_to(int) override {}

 private:
  bool unlocked(std::uint32_t branch) const;
  void emit_seed(std::uint32_t branch);

  const Scenario& scenario_;
  const SimProfile& profile_;
  const std::uint64_t campaign_seed_;
  const std::uint64_t stream_id_;

  std::vector<bool> own_;      // discovered by this fuzzer itself
  std::vector<bool> visible_;  // own_ plus imports; gates children
  std::uint64_t own_count_ = 0;
  std::uint64_t next_file_id_ = 0;
  int last_round_ = -1;
  int advance_in_round_ = 0;
  // Per watch dir, filenames already decoded: refresh runs after every
  // advance, so repeat visits must not re-list or re-read a grown corpus.
  std::unordered_map<std::string, std::unordered_set<std::string>>
      scanned_names_;
};

// Virtual-clock environment. run() consumes no wall time; the campaign CPU
// clock advances by seconds * sum(cores).
class SimEnvironment : public Environment {
 public:
  SimEnvironment(std::span<FuzzerRig> rigs, double total_budget,
                 double start_cpu = 0.0);

  void run(std::span<const RunSlot> slots, double seconds) override;
  void drain() override;
  double now_cpu() const override { return cpu_; }
  void begin_round(int round) override { round_ = round; }

 private:
  std::span<FuzzerRig> rigs_;
  const double budget_;
  double cpu_;
  int round_ = 0;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_SIM_FUZZER_HPP_
