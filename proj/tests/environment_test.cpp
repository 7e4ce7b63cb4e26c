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

#include "fuzzmux/environment.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <memory>

#include "fuzzmux/limiter.hpp"
#include "fuzzmux/util.hpp"
#include "testutil.hpp"

namespace fuzzmux {
namespace {

struct EnvFixture {
  explicit EnvFixture(int n_fuzzers) : oracle(64) {
    for (int i = 0; i < n_fuzzers; ++i) {
      const std::string name = "f" + std::to_string(i);
      auto fuzzer = std::make_unique<test::StubFuzzer>(
          test::StubFuzzer::spec_named(name), tmp / name);
      auto monitor = std::make_unique<CorpusMonitor>(*fuzzer, oracle);
      rigs.push_back({std::move(fuzzer), std::move(monitor)});
    }
  }

  Fuzzer& fuzzer(std::size_t i) { return *rigs[i].fuzzer; }

  test::TempDir tmp;
  test::StubOracle oracle;
  std::vector<FuzzerRig> rigs;
};

TEST(RealEnvironmentTest, BillsWallTimeTimesAssignedShare) {
  EnvFixture fx(2);
  fx.fuzzer(0).start();
  fx.fuzzer(1).start();
  RealEnvironment env(std::span<FuzzerRig>(fx.rigs), nullptr, 0.0, 50);
  EXPECT_DOUBLE_EQ(env.now_cpu(), 0.0);

  const std::vector<RunSlot> slots = {{0, 1.0, 1}, {1, 0.5, 1}};
  const auto start = std::chrono::steady_clock::now();
  env.run(slots, 0.4);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  // The run occupies (at least) the requested wall window.
  EXPECT_GE(wall, 0.4);
  EXPECT_LT(wall, 2.0);
  // Accounting is by assignment, not by measured usage.
  EXPECT_NEAR(env.now_cpu(), 0.4 * 1.0 + 0.4 * 0.5, 1e-9);
  EXPECT_NEAR(fx.fuzzer(0).cpu_time_consumed(), 0.4, 1e-9);
  EXPECT_NEAR(fx.fuzzer(1).cpu_time_consumed(), 0.2, 1e-9);
  // Everyone is parked afterwards.
  EXPECT_EQ(fx.fuzzer(0).state(), FuzzerState::kPaused);
  EXPECT_EQ(fx.fuzzer(1).state(), FuzzerState::kPaused);
}

TEST(RealEnvironmentTest, CarriesStartCpuAndAccumulates) {
  EnvFixture fx(1);
  fx.fuzzer(0).start();
  RealEnvironment env(std::span<FuzzerRig>(fx.rigs), nullptr, 123.0, 50);
  EXPECT_DOUBLE_EQ(env.now_cpu(), 123.0);
  const std::vector<RunSlot> slots = {{0, 2.0, 1}};
  env.run(slots, 0.1);
  EXPECT_NEAR(env.now_cpu(), 123.2, 1e-9);
}

TEST(RealEnvironmentTest, SkipsStoppedFuzzersWithoutBilling) {
  EnvFixture fx(2);
  fx.fuzzer(0).start();  // rig 1 stays stopped
  RealEnvironment env(std::span<FuzzerRig>(fx.rigs), nullptr, 0.0, 50);
  const std::vector<RunSlot> slots = {{0, 1.0, 1}, {1, 1.0, 1}};
  env.run(slots, 0.1);
  EXPECT_NEAR(env.now_cpu(), 0.1, 1e-9);
  EXPECT_DOUBLE_EQ(fx.fuzzer(1).cpu_time_consumed(), 0.0);
  EXPECT_EQ(fx.fuzzer(1).state(), FuzzerState::kStopped);
}

TEST(RealEnvironmentTest, AppliesAndClearsLimiterPerSlot) {
  EnvFixture fx(1);
  fx.fuzzer(0).start();
  DutyCycleLimiter limiter;
  RealEnvironment env(std::span<FuzzerRig>(fx.rigs), &limiter, 0.0, 50);
  const std::vector<RunSlot> slots = {{0, 0.75, 1}};
  env.run(slots, 0.1);
  // The cap was lifted at the end of the run.
  EXPECT_DOUBLE_EQ(limiter.assigned("f0"), 0.0);
  EXPECT_NEAR(fx.fuzzer(0).cpu_time_consumed(), 0.075, 1e-9);
}

TEST(RealEnvironmentTest, PollersHarvestFilesWrittenMidRun) {
  EnvFixture fx(1);
  fx.fuzzer(0).start();
  RealEnvironment env(std::span<FuzzerRig>(fx.rigs), nullptr, 0.0, 20);
  test::write_seed(fx.fuzzer(0).queue_dir(), "s1", "hello");
  // Background pollers run every 20ms; the file lands without drain().
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  EXPECT_EQ(fx.rigs[0].monitor->inputs_processed(), 1u);
  env.drain();
  EXPECT_EQ(fx.rigs[0].monitor->inputs_processed(), 1u);
}

TEST(DutyCycleLimiterTest, TracksAssignments) {
  DutyCycleLimiter limiter;
  EXPECT_DOUBLE_EQ(limiter.assigned("a"), 0.0);
  limiter.apply("a", {}, 0.5);
  limiter.apply("b", {}, 1.5);
  EXPECT_DOUBLE_EQ(limiter.assigned("a"), 0.5);
  limiter.apply("a", {}, 0.25);
  EXPECT_DOUBLE_EQ(limiter.assigned("a"), 0.25);
  limiter.clear("a");
  EXPECT_DOUBLE_EQ(limiter.assigned("a"), 0.0);
  EXPECT_DOUBLE_EQ(limiter.assigned("b"), 1.5);
}

TEST(CgroupLimiterTest, WritesQuotaFilesUnderRoot) {
  test::TempDir tmp;
  CgroupLimiter limiter(tmp / "cg", 100000);
  EXPECT_EQ(limiter.cpu_max_payload(0.5), "50000 100000\n");
  EXPECT_EQ(limiter.cpu_max_payload(2.0), "200000 100000\n");
  EXPECT_EQ(limiter.cpu_max_payload(0.0), "1000 100000\n");
  // Tiny but positive shares clamp to the kernel's minimum quota.
  EXPECT_EQ(limiter.cpu_max_payload(1e-9), "1000 100000\n");

  limiter.apply("afl", {4242, 4243}, 0.5);
  EXPECT_EQ(read_file(tmp / "cg" / "afl" / "cpu.max"), "50000 100000\n");
  EXPECT_EQ(read_file(tmp / "cg" / "afl" / "cgroup.procs"), "4242\n4243\n");

  limiter.clear("afl");
  EXPECT_EQ(read_file(tmp / "cg" / "afl" / "cpu.max"), "max 100000\n");
  // Clearing an unknown group is a no-op, not an error.
  EXPECT_NO_THROW(limiter.clear("nobody"));
}

}  // namespace
}  // namespace fuzzmux
