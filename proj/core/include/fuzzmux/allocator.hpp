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

// The decision core of the two-phase scheduler, kept as pure functions so
// every piece can be tested against independent oracles:
//
//  - aimd_next():      additive-increase / multiplicative-decrease control of
//                      the early-exit threshold theta.
//  - run_prep_loop():  the trend-measurement sweep loop. Runs all fuzzers in
//                      short slices until the coverage spread between the best
//                      and worst fuzzer exceeds theta (early exit, leftover
//                      prep time is handed to the focus phase) or the prep
//                      budget is exhausted.
//  - resource_allocator(): converts per-fuzzer bitmaps into CPU fractions.
//                      The common core (intersection of all maps) is stripped
//                      first, so only *unique* coverage earns time. On early
//                      exit the winner takes everything (split across ties);
//                      otherwise fractions are proportional to unique counts.
//  - focus_slots() / focus_instances(): turn fractions into serial time slots
//                      (single core) or instance counts (multi core).

#ifndef FUZZMUX_ALLOCATOR_HPP_
#define FUZZMUX_ALLOCATOR_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fuzzmux/bitmap.hpp"

namespace fuzzmux {

enum class Policy { kAutofz, kRoundRobin };

// Where the prep loop's trend spread comes from: raw accumulated per-fuzzer
// counts (default), or unique counts after stripping the common core.
enum class DiffSource { kRawCounts, kUniqueCounts };

// Next theta. An early exit means the threshold was too easy to clear, so it
// grows additively; a full prep phase without a clear trend halves it.
double aimd_next(double theta_cur, bool exit_early, double theta_init);

struct PrepOutcome {
  bool exit_early = false;
  double t_remain = 0.0;       // unused prep budget, donated to focus
  double t_prep_actual = 0.0;  // prep time actually consumed
  std::int64_t diff_peak = 0;  // last measured best-minus-worst spread
  int sweeps = 0;
};

// Sweep loop skeleton. run_sweep(t_run) must advance every fuzzer by t_run
// seconds; measure() returns the current coverage spread. Slicing uses
// min(slice, remaining); a residue below one second counts as exhausted.
PrepOutcome run_prep_loop(double t_prep, double slice, double theta_cur,
                          const std::function<void(double)>& run_sweep,
                          const std::function<std::int64_t()>& measure);

struct AllocationResult {
  std::vector<double> fractions;             // per fuzzer, input order
  std::vector<std::uint64_t> unique_counts;  // after common-core removal
  std::vector<std::size_t> winners;          // non-empty iff exit_early
};

// Per-fuzzer unique coverage: count(map - intersection(all maps)).
std::vector<std::uint64_t> unique_coverage_counts(
    std::span<const CoverageBitmap> maps,
    SubtractMode mode = SubtractMode::kBucketBits,
    CountGranularity granularity = CountGranularity::kEntries);

// Fraction assignment given unique counts. Early exit: argmax winners split
// the whole budget evenly, everyone else gets zero. Otherwise proportional;
// if nobody has unique coverage the split is uniform.
AllocationResult allocate_from_counts(std::span<const std::uint64_t> uniq,
                                      bool exit_early);

AllocationResult resource_allocator(
    std::span<const CoverageBitmap> maps, bool exit_early,
    SubtractMode mode = SubtractMode::kBucketBits,
    CountGranularity granularity = CountGranularity::kEntries);

// Serial focus slots: fraction * t_focus_effective * n seconds each, ordered
// by the caller. Slots smaller than min_slot (but nonzero) are folded into
// the largest slot; zero fractions stay exactly zero.
std::vector<double> focus_slots(std::span<const double> fractions,
                                double t_focus_effective, double min_slot);

// Instance count for a fuzzer given total cores and its fraction.
int focus_instances(int cores, double fraction);

}  // namespace fuzzmux

#endif  // FUZZMUX_ALLOCATOR_HPP_
