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

#include "fuzzmux/scheduler.hpp"

#include <algorithm>
#include <numeric>

#include "fuzzmux/log.hpp"

namespace fuzzmux {

namespace {
// Budget admission guard against floating-point crumbs.
constexpr double kBudgetEpsilon = 1e-6;
}  // namespace

Scheduler::Scheduler(ScheduleConfig config, std::span<FuzzerRig> rigs,
                     Environment& env, SeedSyncer& syncer)
    : config_(std::move(config)), rigs_(rigs), env_(env), syncer_(syncer) {
  if (rigs_.empty()) {
    throw ConfigError("scheduler: no fuzzers");
  }
  state_.theta_cur = config_.theta_init;
}

void Scheduler::set_round_sink(std::function<void(const RoundRecord&)> sink) {
  round_sink_ = std::move(sink);
}

void Scheduler::set_coverage_sink(
    std::function<void(double, const std::string&, std::uint64_t, double)>
        sink) {
  coverage_sink_ = std::move(sink);
}

void Scheduler::restore(const SchedulerState& state) { state_ = state; }

bool Scheduler::alive(std::size_t i) const {
  const Fuzzer& f = *rigs_[i].fuzzer;
  return !f.failed() && f.state() != FuzzerState::kStopped;
}

bool Scheduler::any_alive() const {
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    if (alive(i)) return true;
  }
  return false;
}

std::vector<CoverageBitmap> Scheduler::snapshot_bitmaps() const {
  std::vector<CoverageBitmap> maps;
  maps.reserve(rigs_.size());
  for (const FuzzerRig& rig : rigs_) {
    maps.push_back(rig.monitor->snapshot());
  }
  return maps;
}

std::vector<std::pair<std::string, std::uint64_t>> Scheduler::trend_snapshot()
    const {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  out.reserve(rigs_.size());
  for (const FuzzerRig& rig : rigs_) {
    out.emplace_back(rig.fuzzer->name(),
                     rig.monitor->snapshot_count(config_.count_granularity));
  }
  return out;
}

std::int64_t Scheduler::measure_diff_peak() const {
  std::vector<std::uint64_t> counts;
  if (config_.diff_source == DiffSource::kRawCounts) {
    for (std::size_t i = 0; i < rigs_.size(); ++i) {
      if (!alive(i)) continue;
      counts.push_back(
          rigs_[i].monitor->snapshot_count(config_.count_granularity));
    }
  } else {
    // Spread of unique coverage instead of raw accumulated coverage.
    std::vector<CoverageBitmap> maps;
    for (std::size_t i = 0; i < rigs_.size(); ++i) {
      if (alive(i)) maps.push_back(rigs_[i].monitor->snapshot());
    }
    if (!maps.empty()) {
      counts = unique_coverage_counts(maps, config_.subtract_mode,
                                      config_.count_granularity);
    }
  }
  if (counts.size() < 2) return 0;
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  return static_cast<std::int64_t>(*hi) - static_cast<std::int64_t>(*lo);
}

void Scheduler::emit_coverage_rows() {
  if (!coverage_sink_) return;
  const double cpu = env_.now_cpu();
  for (const FuzzerRig& rig : rigs_) {
    const CoverageBitmap map = rig.monitor->snapshot();
    coverage_sink_(cpu, rig.fuzzer->name(),
                   map.count(config_.count_granularity),
                   map.density(config_.count_granularity));
  }
}

void Scheduler::sync_all_now(int round) {
  if (!config_.seed_sync_enabled) return;
  std::vector<Fuzzer*> fuzzers;
  for (const FuzzerRig& rig : rigs_) fuzzers.push_back(rig.fuzzer.get());
  syncer_.sync_all(fuzzers, round);
  env_.drain();
}

PrepOutcome Scheduler::prep_phase() {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    if (alive(i)) members.push_back(i);
  }

  auto run_sweep = [&](double t_run) {
    if (config_.cores == 1) {
      // Serial: each fuzzer gets the full core for the whole slice.
      for (std::size_t i : members) {
        const RunSlot slot{i, 1.0, 1};
        env_.run({&slot, 1}, t_run);
      }
    } else {
      // Parallel: the core pool is split evenly for measurement.
      const double share = static_cast<double>(config_.cores) /
                           static_cast<double>(members.size());
      std::vector<RunSlot> slots;
      for (std::size_t i : members) {
        slots.push_back({i, share, 1});
      }
      env_.run(slots, t_run);
    }
    env_.drain();
    emit_coverage_rows();
  };

  return run_prep_loop(config_.t_prep, config_.slice, state_.theta_cur,
                       run_sweep, [&] { return measure_diff_peak(); });
}

Scheduler::FocusResult Scheduler::focus_phase(
    const std::vector<double>& fractions, double t_focus_effective,
    int round) {
  FocusResult result;
  result.measured_cpu.assign(rigs_.size(), 0.0);

  std::vector<Fuzzer*> all_fuzzers;
  for (const FuzzerRig& rig : rigs_) all_fuzzers.push_back(rig.fuzzer.get());

  if (config_.cores == 1) {
    // Serial slots, biggest share first; ties keep config order.
    const std::vector<double> slots =
        focus_slots(fractions, t_focus_effective, config_.min_focus_slot);
    std::vector<std::size_t> order(rigs_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return fractions[a] > fractions[b];
                     });
    for (std::size_t i : order) {
      if (slots[i] <= 0.0) continue;
      if (!alive(i)) {
        log_warn("focus: {} is down, forfeiting {:.1f}s",
                 rigs_[i].fuzzer->name(), slots[i]);
        continue;
      }
      const double before = rigs_[i].fuzzer->cpu_time_consumed();
      const RunSlot slot{i, 1.0, 1};
      env_.run({&slot, 1}, slots[i]);
      env_.drain();
      result.measured_cpu[i] =
          rigs_[i].fuzzer->cpu_time_consumed() - before;
      emit_coverage_rows();
      if (config_.seed_sync_enabled) {
        syncer_.sync_from(*rigs_[i].fuzzer, all_fuzzers, round);
        env_.drain();
      }
    }
    return result;
  }

  // Multi-core: everyone with a share runs concurrently; one sync at the end
  // of the phase (performed by the round loop).
  std::vector<RunSlot> slots;
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    if (fractions[i] <= 0.0) continue;
    if (!alive(i)) {
      log_warn("focus: {} is down, forfeiting its share",
               rigs_[i].fuzzer->name());
      continue;
    }
    const double cores = static_cast<double>(config_.cores) * fractions[i];
    slots.push_back({i, cores, focus_instances(config_.cores, fractions[i])});
  }
  std::vector<double> before(rigs_.size(), 0.0);
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    before[i] = rigs_[i].fuzzer->cpu_time_consumed();
  }
  if (!slots.empty()) {
    env_.run(slots, t_focus_effective);
    env_.drain();
  }
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    result.measured_cpu[i] =
        rigs_[i].fuzzer->cpu_time_consumed() - before[i];
  }
  emit_coverage_rows();
  return result;
}

void Scheduler::run_one_round() {
  const int round = state_.rounds_done + 1;
  env_.begin_round(round);

  sync_all_now(round);

  PrepOutcome prep;
  AllocationResult alloc;
  double theta_next = state_.theta_cur;
  const double theta_round = state_.theta_cur;

  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    if (alive(i)) members.push_back(i);
  }

  if (config_.policy == Policy::kAutofz) {
    prep = prep_phase();

    std::vector<CoverageBitmap> member_maps;
    for (std::size_t i : members) {
      member_maps.push_back(rigs_[i].monitor->snapshot());
    }
    const AllocationResult member_alloc =
        resource_allocator(member_maps, prep.exit_early,
                           config_.subtract_mode, config_.count_granularity);
    // Spread member results back over the full rig list.
    alloc.fractions.assign(rigs_.size(), 0.0);
    alloc.unique_counts.assign(rigs_.size(), 0);
    for (std::size_t m = 0; m < members.size(); ++m) {
      alloc.fractions[members[m]] = member_alloc.fractions[m];
      alloc.unique_counts[members[m]] = member_alloc.unique_counts[m];
    }
    for (std::size_t w : member_alloc.winners) {
      alloc.winners.push_back(members[w]);
    }

    theta_next =
        aimd_next(state_.theta_cur, prep.exit_early, config_.theta_init);
  } else {
    // Round robin: no measurement, equal focus shares for the living.
    alloc.fractions.assign(rigs_.size(), 0.0);
    alloc.unique_counts.assign(rigs_.size(), 0);
    for (std::size_t i : members) {
      alloc.fractions[i] = 1.0 / static_cast<double>(members.size());
    }
  }

  sync_all_now(round);

  const double t_focus_effective = config_.t_focus + prep.t_remain;
  const FocusResult focus =
      focus_phase(alloc.fractions, t_focus_effective, round);
  if (config_.cores > 1) {
    // Single end-of-phase sync (serial mode syncs after each slot instead).
    sync_all_now(round);
  }
  env_.drain();

  RoundRecord record;
  record.round = round;
  record.diff_peak = prep.diff_peak;
  record.theta = theta_round;
  record.t_prep_actual = prep.t_prep_actual;
  record.t_focus_assigned = t_focus_effective;
  if (prep.exit_early && !alloc.winners.empty()) {
    std::string joined;
    for (std::size_t w : alloc.winners) {
      if (!joined.empty()) joined += '+';
      joined += rigs_[w].fuzzer->name();
    }
    record.winner = joined;
  } else {
    record.winner = "None";
  }
  for (std::size_t i = 0; i < rigs_.size(); ++i) {
    record.allocation.emplace_back(rigs_[i].fuzzer->name(),
                                   alloc.fractions[i]);
    record.counts.emplace_back(
        rigs_[i].fuzzer->name(),
        rigs_[i].monitor->snapshot_count(config_.count_granularity));
    record.focus_cpu.emplace_back(rigs_[i].fuzzer->name(),
                                  focus.measured_cpu[i]);
  }

  state_.theta_cur = theta_next;
  state_.rounds_done = round;
  if (round_sink_) round_sink_(record);
}

CampaignStats Scheduler::run_campaign() {
  CampaignStats stats;

  for (FuzzerRig& rig : rigs_) {
    if (rig.fuzzer->state() != FuzzerState::kStopped) continue;
    try {
      rig.fuzzer->start();
      rig.fuzzer->pause();
    } catch (const std::exception& e) {
      log_warn("campaign: {} failed to start: {}", rig.fuzzer->name(),
               e.what());
    }
  }
  if (!any_alive()) {
    log_error("campaign: every fuzzer failed to start, aborting");
    stats.aborted = true;
    stats.cpu_consumed = env_.now_cpu();
    return stats;
  }

  const double budget = config_.total_cpu_budget;
  while (env_.now_cpu() < budget - kBudgetEpsilon) {
    if (!any_alive()) {
      log_error("campaign: every fuzzer is down, aborting");
      stats.aborted = true;
      break;
    }
    run_one_round();
    ++stats.rounds;
    log_info("round {} done: cpu {:.0f}/{:.0f}s, theta {:.2f}",
             state_.rounds_done, env_.now_cpu(), budget, state_.theta_cur);
  }

  for (FuzzerRig& rig : rigs_) {
    rig.fuzzer->stop();
  }
  stats.cpu_consumed = env_.now_cpu();
  return stats;
}

}  // namespace fuzzmux
