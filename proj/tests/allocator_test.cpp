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

#include "fuzzmux/allocator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fuzzmux/util.hpp"

namespace fuzzmux {
namespace {

// 15-round reference trace of the threshold controller on a real ensemble
// campaign (exiv2 target). theta[r] is the threshold in force during round
// r+1, early[r] says whether that round exited prep early, diff[r] is the
// spread measured when the round's prep ended, and t_prep[r] is the prep
// time actually consumed out of 300s (30s slices, 600s round total).
constexpr int kRounds = 15;
constexpr double kTheta[kRounds] = {100,   200,   300,   150,    75,
                                    175,   87.5,  43.75, 21.88,  121.88,
                                    60.94, 30.47, 15.23, 115.23, 57.62};
constexpr bool kEarly[kRounds] = {true,  true,  false, false, true,
                                  false, false, false, true,  false,
                                  false, false, true,  false, false};
constexpr std::int64_t kDiff[kRounds] = {857, 234, 116, 48, 92, 30, 22, 26,
                                         71,  31,  21,  24, 27, 12, 40};
constexpr double kTPrep[kRounds] = {30,  150, 300, 300, 300, 300, 300, 300,
                                    90,  300, 300, 300, 300, 300, 300};

TEST(AimdTest, GrowsAdditivelyAndShrinksMultiplicatively) {
  EXPECT_DOUBLE_EQ(aimd_next(100.0, true, 100.0), 200.0);
  EXPECT_DOUBLE_EQ(aimd_next(300.0, false, 100.0), 150.0);
  EXPECT_DOUBLE_EQ(aimd_next(21.875, true, 100.0), 121.875);
  EXPECT_THROW(aimd_next(0.0, true, 100.0), std::invalid_argument);
  EXPECT_THROW(aimd_next(100.0, true, 0.0), std::invalid_argument);
}

TEST(AimdTest, FifteenRoundReferenceReplay) {
  double theta = 100.0;
  for (int r = 0; r < kRounds; ++r) {
    EXPECT_NEAR(theta, kTheta[r], 0.005 + 1e-9) << "round " << (r + 1);
    theta = aimd_next(theta, kEarly[r], 100.0);
  }
}

// Replays one round's prep loop from the reference trace: sweeps before the
// recorded exit report no spread, the exit sweep reports the recorded one.
PrepOutcome replay_round(int r) {
  const int exit_sweep = static_cast<int>(kTPrep[r] / 30.0);
  int sweep = 0;
  return run_prep_loop(
      300.0, 30.0, kTheta[r], [&](double) { ++sweep; },
      [&]() -> std::int64_t {
        return (kEarly[r] && sweep < exit_sweep) ? 0 : kDiff[r];
      });
}

TEST(PrepLoopTest, FifteenRoundReferenceReplay) {
  for (int r = 0; r < kRounds; ++r) {
    const PrepOutcome out = replay_round(r);
    EXPECT_EQ(out.exit_early, kEarly[r]) << "round " << (r + 1);
    EXPECT_DOUBLE_EQ(out.t_prep_actual, kTPrep[r]) << "round " << (r + 1);
    EXPECT_DOUBLE_EQ(out.t_prep_actual + (300.0 + out.t_remain), 600.0)
        << "round " << (r + 1);
    EXPECT_EQ(out.diff_peak, kDiff[r]) << "round " << (r + 1);
  }
}

TEST(PrepLoopTest, FirstSweepEarlyExitDonatesTheRest) {
  int sweeps = 0;
  const PrepOutcome out = run_prep_loop(
      300.0, 30.0, 100.0, [&](double t) {
        ++sweeps;
        EXPECT_DOUBLE_EQ(t, 30.0);
      },
      [] { return 857; });
  EXPECT_TRUE(out.exit_early);
  EXPECT_EQ(sweeps, 1);
  EXPECT_DOUBLE_EQ(out.t_prep_actual, 30.0);
  EXPECT_DOUBLE_EQ(out.t_remain, 270.0);
}

TEST(PrepLoopTest, ExhaustionKeepsNothing) {
  const PrepOutcome out = run_prep_loop(
      300.0, 30.0, 1000.0, [](double) {}, [] { return 5; });
  EXPECT_FALSE(out.exit_early);
  EXPECT_DOUBLE_EQ(out.t_remain, 0.0);
  EXPECT_DOUBLE_EQ(out.t_prep_actual, 300.0);
  EXPECT_EQ(out.sweeps, 10);
}

TEST(PrepLoopTest, SubSecondResidueIsExhausted) {
  // 90.5s budget in 30s slices: 30+30+30 runs, 0.5s residue is dropped.
  double total = 0;
  const PrepOutcome out = run_prep_loop(
      90.5, 30.0, 100.0, [&](double t) { total += t; }, [] { return 0; });
  EXPECT_FALSE(out.exit_early);
  EXPECT_EQ(out.sweeps, 3);
  EXPECT_DOUBLE_EQ(total, 90.0);
}

TEST(PrepLoopTest, DiffEqualToThetaDoesNotExit) {
  const PrepOutcome out = run_prep_loop(
      60.0, 30.0, 100.0, [](double) {}, [] { return 100; });
  EXPECT_FALSE(out.exit_early);
}

TEST(AllocateTest, ProportionalToUniqueCounts) {
  const std::vector<std::uint64_t> uniq{60, 30, 10};
  const AllocationResult out = allocate_from_counts(uniq, false);
  EXPECT_DOUBLE_EQ(out.fractions[0], 0.6);
  EXPECT_DOUBLE_EQ(out.fractions[1], 0.3);
  EXPECT_DOUBLE_EQ(out.fractions[2], 0.1);
  EXPECT_TRUE(out.winners.empty());
}

TEST(AllocateTest, EarlyExitWinnerTakesAll) {
  const std::vector<std::uint64_t> uniq{60, 30, 10};
  const AllocationResult out = allocate_from_counts(uniq, true);
  EXPECT_DOUBLE_EQ(out.fractions[0], 1.0);
  EXPECT_DOUBLE_EQ(out.fractions[1], 0.0);
  EXPECT_DOUBLE_EQ(out.fractions[2], 0.0);
  ASSERT_EQ(out.winners.size(), 1u);
  EXPECT_EQ(out.winners[0], 0u);
}

TEST(AllocateTest, EarlyExitTiesSplitEvenly) {
  const std::vector<std::uint64_t> uniq{50, 50, 10};
  const AllocationResult out = allocate_from_counts(uniq, true);
  EXPECT_DOUBLE_EQ(out.fractions[0], 0.5);
  EXPECT_DOUBLE_EQ(out.fractions[1], 0.5);
  EXPECT_DOUBLE_EQ(out.fractions[2], 0.0);
  EXPECT_EQ(out.winners.size(), 2u);
}

TEST(AllocateTest, AllZeroSplitsUniformly) {
  const std::vector<std::uint64_t> uniq{0, 0, 0, 0};
  for (const bool early : {false, true}) {
    const AllocationResult out = allocate_from_counts(uniq, early);
    for (const double f : out.fractions) EXPECT_DOUBLE_EQ(f, 0.25);
  }
}

TEST(AllocateTest, FractionsFormASimplex) {
  DetRng rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + rng.next_below(6);
    std::vector<std::uint64_t> uniq(n);
    for (auto& u : uniq) u = rng.next_below(1000);
    const AllocationResult out =
        allocate_from_counts(uniq, rng.next_unit() < 0.5);
    const double sum =
        std::accumulate(out.fractions.begin(), out.fractions.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (const double f : out.fractions) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(AllocateTest, ScaleInvariance) {
  const std::vector<std::uint64_t> a{6, 3, 1};
  const std::vector<std::uint64_t> b{600, 300, 100};
  const auto fa = allocate_from_counts(a, false).fractions;
  const auto fb = allocate_from_counts(b, false).fractions;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_DOUBLE_EQ(fa[i], fb[i]);
  }
}

TEST(FocusSlotsTest, SlotsScaleWithEnsembleSize) {
  const std::vector<double> fractions{0.5, 0.3, 0.2};
  const std::vector<double> slots = focus_slots(fractions, 300.0, 1.0);
  EXPECT_DOUBLE_EQ(slots[0], 450.0);
  EXPECT_DOUBLE_EQ(slots[1], 270.0);
  EXPECT_DOUBLE_EQ(slots[2], 180.0);
}

TEST(FocusSlotsTest, SliversFoldIntoLargest) {
  const std::vector<double> fractions{0.999, 0.001, 0.0};
  const std::vector<double> slots = focus_slots(fractions, 300.0, 1.0);
  // 0.001 * 900 = 0.9s < 1s: folded into the leader. Zero stays zero.
  EXPECT_DOUBLE_EQ(slots[0], 900.0);
  EXPECT_DOUBLE_EQ(slots[1], 0.0);
  EXPECT_DOUBLE_EQ(slots[2], 0.0);
}

TEST(FocusSlotsTest, TotalTimeConserved) {
  DetRng rng(13);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t n = 1 + rng.next_below(6);
    std::vector<double> fractions(n, 0.0);
    double sum = 0;
    for (auto& f : fractions) {
      f = rng.next_unit();
      sum += f;
    }
    for (auto& f : fractions) f /= sum;
    const std::vector<double> slots = focus_slots(fractions, 300.0, 1.0);
    const double total = std::accumulate(slots.begin(), slots.end(), 0.0);
    EXPECT_NEAR(total, 300.0 * static_cast<double>(n), 1e-6);
  }
}

TEST(FocusInstancesTest, CeilingGrid) {
  for (int cores = 1; cores <= 8; ++cores) {
    for (int tenth = 0; tenth <= 10; ++tenth) {
      const double fraction = static_cast<double>(tenth) / 10.0;
      EXPECT_EQ(focus_instances(cores, fraction),
                static_cast<int>(std::ceil(cores * fraction)));
    }
  }
  EXPECT_THROW(focus_instances(0, 0.5), std::invalid_argument);
  EXPECT_THROW(focus_instances(4, 1.5), std::invalid_argument);
}

TEST(UniqueCountsTest, CommonCoreIsStripped) {
  // Three 8-byte maps: entries 0-1 shared by all, entry 2 only in map 0,
  // entries 3-4 only in map 1.
  std::vector<std::uint8_t> m0(8, 0), m1(8, 0), m2(8, 0);
  m0[0] = m1[0] = m2[0] = 0x01;
  m0[1] = m1[1] = m2[1] = 0x02;
  m0[2] = 0x04;
  m1[3] = 0x01;
  m1[4] = 0x01;
  const std::vector<CoverageBitmap> maps{CoverageBitmap{std::move(m0)},
                                         CoverageBitmap{std::move(m1)},
                                         CoverageBitmap{std::move(m2)}};
  const std::vector<std::uint64_t> uniq = unique_coverage_counts(maps);
  EXPECT_EQ(uniq[0], 1u);
  EXPECT_EQ(uniq[1], 2u);
  EXPECT_EQ(uniq[2], 0u);

  const AllocationResult out = resource_allocator(maps, false);
  EXPECT_DOUBLE_EQ(out.fractions[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(out.fractions[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(out.fractions[2], 0.0);
}

}  // namespace
}  // namespace fuzzmux
