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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fuzzmux {

namespace {
// Prep residues below this many seconds are not worth another sweep.
constexpr double kMinSweep = 1.0;
}  // namespace

double aimd_next(double theta_cur, bool exit_early, double theta_init) {
  if (theta_cur <= 0 || theta_init <= 0) {
    throw std::invalid_argument("aimd_next: thresholds must be positive");
  }
  return exit_early ? theta_cur + theta_init : theta_cur * 0.5;
}

PrepOutcome run_prep_loop(double t_prep, double slice, double theta_cur,
                          const std::function<void(double)>& run_sweep,
                          const std::function<std::int64_t()>& measure) {
  if (t_prep < 0 || slice <= 0) {
    throw std::invalid_argument("run_prep_loop: bad time budget");
  }
  PrepOutcome out;
  double t_remain = t_prep;
  while (t_remain >= kMinSweep) {
    const double t_run = std::min(t_remain, slice);
    run_sweep(t_run);
    t_remain -= t_run;
    out.t_prep_actual += t_run;
    ++out.sweeps;
    out.diff_peak = measure();
    if (static_cast<double>(out.diff_peak) > theta_cur) {
      out.exit_early = true;
      out.t_remain = t_remain;
      return out;
    }
  }
  // Budget exhausted without a clear trend; nothing is donated to focus.
  out.exit_early = false;
  out.t_remain = 0.0;
  return out;
}

std::vector<std::uint64_t> unique_coverage_counts(
    std::span<const CoverageBitmap> maps, SubtractMode mode,
    CountGranularity granularity) {
  const CoverageBitmap common = CoverageBitmap::intersect_all(maps);
  std::vector<std::uint64_t> uniq;
  uniq.reserve(maps.size());
  for (const CoverageBitmap& m : maps) {
    uniq.push_back(m.subtract(common, mode).count(granularity));
  }
  return uniq;
}

AllocationResult allocate_from_counts(std::span<const std::uint64_t> uniq,
                                      bool exit_early) {
  if (uniq.empty()) {
    throw std::invalid_argument("allocate_from_counts: no fuzzers");
  }
  AllocationResult out;
  out.unique_counts.assign(uniq.begin(), uniq.end());
  const std::size_t n = uniq.size();
  out.fractions.assign(n, 0.0);

  if (exit_early) {
    const std::uint64_t best = *std::max_element(uniq.begin(), uniq.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (uniq[i] == best) out.winners.push_back(i);
    }
    const double share = 1.0 / static_cast<double>(out.winners.size());
    for (std::size_t w : out.winners) out.fractions[w] = share;
    return out;
  }

  std::uint64_t sum = 0;
  for (std::uint64_t u : uniq) sum += u;
  if (sum == 0) {
    // No unique progress anywhere; keep everyone alive equally.
    const double share = 1.0 / static_cast<double>(n);
    out.fractions.assign(n, share);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.fractions[i] =
        static_cast<double>(uniq[i]) / static_cast<double>(sum);
  }
  return out;
}

AllocationResult resource_allocator(std::span<const CoverageBitmap> maps,
                                    bool exit_early, SubtractMode mode,
                                    CountGranularity granularity) {
  return allocate_from_counts(unique_coverage_counts(maps, mode, granularity),
                              exit_early);
}

std::vector<double> focus_slots(std::span<const double> fractions,
                                double t_focus_effective, double min_slot) {
  const double total =
      t_focus_effective * static_cast<double>(fractions.size());
  std::vector<double> slots(fractions.size(), 0.0);
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    slots[i] = total * fractions[i];
  }
  // Slivers are not worth a context switch; give them to the leader. A zero
  // fraction means "do not run" and is never promoted to a slot.
  std::size_t largest = 0;
  for (std::size_t i = 1; i < slots.size(); ++i) {
    if (slots[i] > slots[largest]) largest = i;
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i != largest && slots[i] > 0.0 && slots[i] < min_slot) {
      slots[largest] += slots[i];
      slots[i] = 0.0;
    }
  }
  return slots;
}

int focus_instances(int cores, double fraction) {
  if (cores < 1) throw std::invalid_argument("focus_instances: cores < 1");
  if (fraction < 0 || fraction > 1) {
    throw std::invalid_argument("focus_instances: fraction out of range");
  }
  return static_cast<int>(std::ceil(static_cast<double>(cores) * fraction));
}

}  // namespace fuzzmux
