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

// Execution environments. The scheduler is pure policy: it decides who runs,
// at what share, for how long. An Environment makes that happen against real
// child processes (wall clock) or the simulation (virtual clock), and owns
// the campaign-wide CPU accounting both modes share: running a slot for S
// seconds at quota Q consumes S*Q CPU seconds.

#ifndef FUZZMUX_ENVIRONMENT_HPP_
#define FUZZMUX_ENVIRONMENT_HPP_

#include <memory>
#include <span>
#include <thread>
#include <vector>

#include "fuzzmux/fuzzer.hpp"
#include "fuzzmux/limiter.hpp"
#include "fuzzmux/monitor.hpp"

namespace fuzzmux {

// One baseline fuzzer plus its coverage monitor.
struct FuzzerRig {
  std::unique_ptr<Fuzzer> fuzzer;
  std::unique_ptr<CorpusMonitor> monitor;
};

// One scheduling decision: run rig `rig` with `cores` worth of CPU spread
// over `instances` instances.
struct RunSlot {
  std::size_t rig = 0;
  double cores = 1.0;
  int instances = 1;
};

class Environment {
 public:
  virtual ~Environment() = default;

  // Runs the given slots concurrently for `seconds`, leaving every touched
  // fuzzer paused afterwards. Skips failed/stopped fuzzers.
  virtual void run(std::span<const RunSlot> slots, double seconds) = 0;

  // Harvests all pending corpus files into the per-fuzzer bitmaps.
  virtual void drain() = 0;

  // Total campaign CPU seconds consumed so far.
  virtual double now_cpu() const = 0;

  // Round hook; the sim uses it to key per-round RNG streams.
  virtual void begin_round(int round) { (void)round; }
};

// Wall-clock environment for real fuzzer processes. Fractional shares are
// enforced by the limiter if one is given, and by SIGSTOP/SIGCONT duty
// cycling otherwise. Monitors poll continuously on background threads.
class RealEnvironment : public Environment {
 public:
  RealEnvironment(std::span<FuzzerRig> rigs, ResourceLimiter* limiter,
                  double start_cpu = 0.0, int poll_interval_ms = 500);
  ~RealEnvironment() override;

  void run(std::span<const RunSlot> slots, double seconds) override;
  void drain() override;
  double now_cpu() const override { return cpu_; }

 private:
  std::span<FuzzerRig> rigs_;
  ResourceLimiter* limiter_;  // may be null: pure duty cycling
  double cpu_;
  std::vector<std::jthread> pollers_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_ENVIRONMENT_HPP_
