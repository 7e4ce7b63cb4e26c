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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>

#include "fuzzmux/sim_fuzzer.hpp"
#include "testutil.hpp"

namespace fuzzmux {
namespace {

struct CoverageRow {
  double cpu;
  std::string fuzzer;
  std::uint64_t count;
  double density;
};

// A full sim-backed scheduler rig: scenario, fuzzers, monitors, environment.
struct Harness {
  Harness(Scenario sc, ScheduleConfig cfg, std::uint64_t seed = 42)
      : scenario(std::move(sc)), oracle(scenario.universe) {
    for (std::size_t i = 0; i < scenario.profiles.size(); ++i) {
      const std::string& name = scenario.profiles[i].name;
      auto fuzzer = std::make_unique<SimFuzzer>(
          test::StubFuzzer::spec_named(name), tmp / name, scenario, i, seed);
      auto monitor = std::make_unique<CorpusMonitor>(*fuzzer, oracle);
      rigs.push_back({std::move(fuzzer), std::move(monitor)});
    }
    env = std::make_unique<SimEnvironment>(std::span<FuzzerRig>(rigs),
                                           cfg.total_cpu_budget);
    scheduler = std::make_unique<Scheduler>(cfg, std::span<FuzzerRig>(rigs),
                                            *env, syncer);
    scheduler->set_round_sink(
        [this](const RoundRecord& r) { records.push_back(r); });
    scheduler->set_coverage_sink([this](double cpu, const std::string& f,
                                        std::uint64_t count, double density) {
      coverage.push_back({cpu, f, count, density});
    });
  }

  test::TempDir tmp;
  Scenario scenario;
  SimOracle oracle;
  std::vector<FuzzerRig> rigs;
  SeedSyncer syncer;  // no index persistence
  std::unique_ptr<SimEnvironment> env;
  std::unique_ptr<Scheduler> scheduler;
  std::vector<RoundRecord> records;
  std::vector<CoverageRow> coverage;
};

ScheduleConfig default_config(double budget) {
  ScheduleConfig cfg;
  cfg.t_prep = 300.0;
  cfg.t_focus = 300.0;
  cfg.theta_init = 100.0;
  cfg.slice = 30.0;
  cfg.cores = 1;
  cfg.total_cpu_budget = budget;
  return cfg;
}

void check_record_invariants(const RoundRecord& r,
                             const std::vector<std::string>& names) {
  ASSERT_EQ(r.allocation.size(), names.size());
  ASSERT_EQ(r.counts.size(), names.size());
  ASSERT_EQ(r.focus_cpu.size(), names.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(r.allocation[i].first, names[i]);
    EXPECT_EQ(r.counts[i].first, names[i]);
    EXPECT_EQ(r.focus_cpu[i].first, names[i]);
    EXPECT_GE(r.allocation[i].second, 0.0);
    sum += r.allocation[i].second;
  }
  // Rows sum to one (or all-zero, which cannot happen while anyone is alive).
  EXPECT_NEAR(sum, 1.0, 1e-9);
  // Zero fraction means exactly zero focus CPU.
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (r.allocation[i].second == 0.0) {
      EXPECT_EQ(r.focus_cpu[i].second, 0.0) << names[i];
    }
  }
}

std::vector<std::string> profile_names(const Scenario& s) {
  std::vector<std::string> names;
  for (const auto& p : s.profiles) names.push_back(p.name);
  return names;
}

TEST(SchedulerTest, EmptyRigListRejected) {
  test::TempDir tmp;
  SeedSyncer syncer;
  std::vector<FuzzerRig> rigs;
  SimEnvironment env(std::span<FuzzerRig>(rigs), 100.0);
  EXPECT_THROW(Scheduler(default_config(100.0), std::span<FuzzerRig>(rigs),
                         env, syncer),
               ConfigError);
}

// Three fuzzers, one round of budget: prep 3x300 + focus 900 = 1800 CPU s.
TEST(SchedulerTest, UniformOneRoundConsumesNTimesPhaseBudget) {
  Harness h(builtin_scenario("uniform"), default_config(1800.0));
  const CampaignStats stats = h.scheduler->run_campaign();

  EXPECT_EQ(stats.rounds, 1);
  EXPECT_FALSE(stats.aborted);
  EXPECT_NEAR(stats.cpu_consumed, 1800.0, 1e-6);
  ASSERT_EQ(h.records.size(), 1u);

  const RoundRecord& r = h.records[0];
  EXPECT_EQ(r.round, 1);
  // Identical twins: spread stays far below theta, so no early exit.
  EXPECT_EQ(r.winner, "None");
  EXPECT_DOUBLE_EQ(r.theta, 100.0);
  EXPECT_DOUBLE_EQ(r.t_prep_actual, 300.0);
  EXPECT_DOUBLE_EQ(r.t_focus_assigned, 300.0);
  check_record_invariants(r, profile_names(h.scenario));

  // Post-round sync has equalized what everyone can see.
  EXPECT_EQ(r.counts[0].second, r.counts[1].second);
  EXPECT_EQ(r.counts[1].second, r.counts[2].second);
  EXPECT_GT(r.counts[0].second, 0u);
}

TEST(SchedulerTest, RoundsAreAtomicAndMayOverrunBudget) {
  // 1900 admits a second round at cpu=1800; that round then runs whole.
  Harness h(builtin_scenario("uniform"), default_config(1900.0));
  const CampaignStats stats = h.scheduler->run_campaign();
  EXPECT_EQ(stats.rounds, 2);
  EXPECT_NEAR(stats.cpu_consumed, 3600.0, 1e-6);
}

TEST(SchedulerTest, SingleFuzzerGetsWholeFocusShare) {
  Scenario solo;
  solo.name = "solo";
  solo.universe.n_branches = 1024;
  solo.universe.map_size = 1024;
  solo.universe.parents_of.assign(1024, {});
  solo.profiles.push_back({.name = "only", .base_rate = 1e-5});

  Harness h(std::move(solo), default_config(600.0));
  const CampaignStats stats = h.scheduler->run_campaign();
  EXPECT_EQ(stats.rounds, 1);
  ASSERT_EQ(h.records.size(), 1u);
  const RoundRecord& r = h.records[0];
  // One fuzzer has no spread to measure: never an early exit.
  EXPECT_EQ(r.winner, "None");
  EXPECT_EQ(r.diff_peak, 0);
  ASSERT_EQ(r.allocation.size(), 1u);
  EXPECT_DOUBLE_EQ(r.allocation[0].second, 1.0);
  EXPECT_NEAR(r.focus_cpu[0].second, 300.0, 1e-9);
}

TEST(SchedulerTest, RoundRobinSkipsMeasurementAndSplitsEvenly) {
  ScheduleConfig cfg = default_config(1800.0);
  cfg.policy = Policy::kRoundRobin;
  Harness h(builtin_scenario("dominant"), cfg);
  const CampaignStats stats = h.scheduler->run_campaign();

  // No prep phase: each round costs only n * t_focus = 900.
  EXPECT_EQ(stats.rounds, 2);
  EXPECT_NEAR(stats.cpu_consumed, 1800.0, 1e-6);
  ASSERT_EQ(h.records.size(), 2u);
  for (const RoundRecord& r : h.records) {
    EXPECT_EQ(r.winner, "None");
    EXPECT_EQ(r.diff_peak, 0);
    EXPECT_DOUBLE_EQ(r.t_prep_actual, 0.0);
    EXPECT_DOUBLE_EQ(r.t_focus_assigned, 300.0);
    // Theta is never touched.
    EXPECT_DOUBLE_EQ(r.theta, 100.0);
    check_record_invariants(r, profile_names(h.scenario));
    for (const auto& [name, frac] : r.allocation) {
      EXPECT_DOUBLE_EQ(frac, 1.0 / 3.0) << name;
    }
    for (const auto& [name, cpu] : r.focus_cpu) {
      EXPECT_NEAR(cpu, 300.0, 1e-9) << name;
    }
  }
}

// Dominant fuzzer plus a zero-rate passenger: round 1 exits early, the winner
// takes the whole focus phase, and the passenger gets exactly zero CPU.
TEST(SchedulerTest, EarlyExitWinnerTakesAllAndIdleGetsNothing) {
  Harness h(builtin_scenario("deadweight"), default_config(2400.0));
  const CampaignStats stats = h.scheduler->run_campaign();

  EXPECT_EQ(stats.rounds, 1);
  ASSERT_EQ(h.records.size(), 1u);
  const RoundRecord& r = h.records[0];
  EXPECT_EQ(r.winner, "dominant");
  EXPECT_GT(r.diff_peak, 100);
  // First sweep already shows the trend.
  EXPECT_DOUBLE_EQ(r.t_prep_actual, 30.0);
  EXPECT_DOUBLE_EQ(r.t_focus_assigned, 570.0);
  check_record_invariants(r, profile_names(h.scenario));

  ASSERT_EQ(r.allocation.size(), 4u);
  EXPECT_DOUBLE_EQ(r.allocation[0].second, 1.0);  // dominant
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(r.allocation[i].second, 0.0);
    EXPECT_DOUBLE_EQ(r.focus_cpu[i].second, 0.0);
  }
  // Winner absorbs the whole slot pool: t_focus_effective * n.
  EXPECT_NEAR(r.focus_cpu[0].second, 570.0 * 4, 1e-6);
}

TEST(SchedulerTest, FocusCpuTotalsMatchAssignedBudget) {
  Harness h(builtin_scenario("complementary"), default_config(5400.0));
  h.scheduler->run_campaign();
  ASSERT_GE(h.records.size(), 1u);
  const auto names = profile_names(h.scenario);
  for (const RoundRecord& r : h.records) {
    check_record_invariants(r, names);
    double total = 0.0;
    for (const auto& [name, cpu] : r.focus_cpu) total += cpu;
    EXPECT_NEAR(total, r.t_focus_assigned * 3, 1e-6) << "round " << r.round;
    EXPECT_DOUBLE_EQ(r.t_prep_actual + r.t_focus_assigned, 600.0);
  }
}

TEST(SchedulerTest, ThetaFollowsAimdAcrossRounds) {
  Harness h(builtin_scenario("dominant"), default_config(9000.0));
  h.scheduler->run_campaign();
  ASSERT_GE(h.records.size(), 2u);
  double theta = 100.0;
  for (const RoundRecord& r : h.records) {
    EXPECT_DOUBLE_EQ(r.theta, theta) << "round " << r.round;
    const bool early = r.winner != "None";
    // Early exit iff the spread beat theta.
    EXPECT_EQ(early, r.diff_peak > theta) << "round " << r.round;
    theta = early ? theta + 100.0 : theta * 0.5;
  }
  EXPECT_DOUBLE_EQ(h.scheduler->state().theta_cur, theta);
  EXPECT_EQ(h.scheduler->state().rounds_done,
            static_cast<int>(h.records.size()));
}

TEST(SchedulerTest, SyncDisabledLeavesCorporaIndependent) {
  ScheduleConfig cfg = default_config(5400.0);
  cfg.seed_sync_enabled = false;
  Harness h(builtin_scenario("uniform"), cfg);
  h.scheduler->run_campaign();
  ASSERT_GE(h.records.size(), 3u);
  // Without sync the twins' independent draws cannot stay identical across
  // every round.
  bool any_unequal = false;
  for (const RoundRecord& r : h.records) {
    if (r.counts[0].second != r.counts[1].second ||
        r.counts[1].second != r.counts[2].second) {
      any_unequal = true;
    }
  }
  EXPECT_TRUE(any_unequal);
}

TEST(SchedulerTest, ResumeContinuesThetaAndRoundCounter) {
  Harness h(builtin_scenario("uniform"), default_config(1800.0));
  h.scheduler->restore({.theta_cur = 25.0, .rounds_done = 7});
  h.scheduler->run_campaign();
  ASSERT_EQ(h.records.size(), 1u);
  EXPECT_EQ(h.records[0].round, 8);
  EXPECT_DOUBLE_EQ(h.records[0].theta, 25.0);
}

TEST(SchedulerTest, CoverageRowsAreConsistentAndOrdered) {
  Harness h(builtin_scenario("uniform"), default_config(1800.0));
  h.scheduler->run_campaign();
  ASSERT_FALSE(h.coverage.empty());
  double last_cpu = 0.0;
  for (const CoverageRow& row : h.coverage) {
    EXPECT_GE(row.cpu, last_cpu);
    last_cpu = row.cpu;
    EXPECT_NEAR(row.density, static_cast<double>(row.count) / 16384.0, 1e-12);
  }
  // Per-fuzzer counts never decrease.
  std::map<std::string, std::uint64_t> prev;
  for (const CoverageRow& row : h.coverage) {
    auto it = prev.find(row.fuzzer);
    if (it != prev.end()) EXPECT_GE(row.count, it->second) << row.fuzzer;
    prev[row.fuzzer] = row.count;
  }
  EXPECT_EQ(prev.size(), 3u);
}

TEST(SchedulerTest, TrendSnapshotMatchesFinalRecord) {
  Harness h(builtin_scenario("uniform"), default_config(1800.0));
  h.scheduler->run_campaign();
  ASSERT_FALSE(h.records.empty());
  const auto snapshot = h.scheduler->trend_snapshot();
  ASSERT_EQ(snapshot.size(), h.records.back().counts.size());
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    EXPECT_EQ(snapshot[i].first, h.records.back().counts[i].first);
    EXPECT_EQ(snapshot[i].second, h.records.back().counts[i].second);
  }
}

}  // namespace
}  // namespace fuzzmux
