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

// The round loop. Each round:
//
//   sync -> prep (trend sweeps, may exit early)   -> allocate -> AIMD(theta)
//        -> sync -> focus (time slots or core shares) -> record
//
// Prep runs every fuzzer equally in short slices and watches the spread
// between the best and worst coverage count. A spread above theta means the
// trend is clear: prep ends early, its leftover budget joins the focus
// phase, and the winner takes the whole focus allocation. No clear trend
// means proportional-to-unique-coverage allocation. Theta follows AIMD, so
// decisive ensembles get cheap prep phases and murky ones get longer looks.
//
// The round-robin policy skips measurement entirely: every fuzzer gets an
// equal focus share every round.

#ifndef FUZZMUX_SCHEDULER_HPP_
#define FUZZMUX_SCHEDULER_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fuzzmux/allocator.hpp"
#include "fuzzmux/environment.hpp"
#include "fuzzmux/seed_sync.hpp"

namespace fuzzmux {

struct ScheduleConfig {
  double t_prep = 300.0;
  double t_focus = 300.0;
  double theta_init = 100.0;
  double slice = 30.0;
  int cores = 1;
  double total_cpu_budget = 86400.0;
  Policy policy = Policy::kAutofz;
  CountGranularity count_granularity = CountGranularity::kEntries;
  SubtractMode subtract_mode = SubtractMode::kBucketBits;
  DiffSource diff_source = DiffSource::kRawCounts;
  bool seed_sync_enabled = true;
  double min_focus_slot = 1.0;
};

struct SchedulerState {
  double theta_cur = 0.0;
  int rounds_done = 0;
};

// One telemetry row per round. Kept in config order for every per-fuzzer
// sequence so emission is deterministic.
struct RoundRecord {
  int round = 0;
  std::string winner;  // "None", a fuzzer name, or tied names joined by '+'
  std::int64_t diff_peak = 0;
  double theta = 0.0;  // threshold in force during this round's prep
  double t_prep_actual = 0.0;
  double t_focus_assigned = 0.0;
  std::vector<std::pair<std::string, double>> allocation;
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::vector<std::pair<std::string, double>> focus_cpu;
};

struct CampaignStats {
  int rounds = 0;
  double cpu_consumed = 0.0;
  bool aborted = false;  // every fuzzer failed
};

class Scheduler {
 public:
  Scheduler(ScheduleConfig config, std::span<FuzzerRig> rigs,
            Environment& env, SeedSyncer& syncer);

  // Telemetry hooks. round_sink fires once per finished round; coverage_sink
  // fires per fuzzer after every sweep and focus slot.
  void set_round_sink(std::function<void(const RoundRecord&)> sink);
  void set_coverage_sink(
      std::function<void(double cpu_seconds, const std::string& fuzzer,
                         std::uint64_t count, double density)>
          sink);

  // Resume support: continue with a known theta and round counter.
  void restore(const SchedulerState& state);
  const SchedulerState& state() const { return state_; }

  // Runs rounds until the CPU budget is consumed or every fuzzer has failed.
  CampaignStats run_campaign();

  // Current per-fuzzer coverage counts and densities, config order.
  std::vector<std::pair<std::string, std::uint64_t>> trend_snapshot() const;

 private:
  struct FocusResult {
    std::vector<double> measured_cpu;  // per rig
  };

  bool any_alive() const;
  bool alive(std::size_t i) const;
  std::vector<CoverageBitmap> snapshot_bitmaps() const;
  std::int64_t measure_diff_peak() const;
  void emit_coverage_rows();
  void sync_all_now(int round);

  PrepOutcome prep_phase();
  FocusResult focus_phase(const std::vector<double>& fractions,
                          double t_focus_effective, int round);
  void run_one_round();

  const ScheduleConfig config_;
  std::span<FuzzerRig> rigs_;
  Environment& env_;
  SeedSyncer& syncer_;
  SchedulerState state_;

  std::function<void(const RoundRecord&)> round_sink_;
  std::function<void(double, const std::string&, std::uint64_t, double)>
      coverage_sink_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_SCHEDULER_HPP_
