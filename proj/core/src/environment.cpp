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

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fuzzmux/log.hpp"
#include "fuzzmux/process_fuzzer.hpp"

namespace fuzzmux {

namespace {
constexpr auto kDutyWindow = std::chrono::milliseconds(200);
}

RealEnvironment::RealEnvironment(std::span<FuzzerRig> rigs,
                                 ResourceLimiter* limiter, double start_cpu,
                                 int poll_interval_ms)
    : rigs_(rigs), limiter_(limiter), cpu_(start_cpu) {
  for (FuzzerRig& rig : rigs_) {
    pollers_.emplace_back([&rig, poll_interval_ms](std::stop_token stop) {
      while (!stop.stop_requested()) {
        rig.monitor->poll();
        std::this_thread::sleep_for(
            std::chrono::milliseconds(poll_interval_ms));
      }
    });
  }
}

RealEnvironment::~RealEnvironment() {
  for (std::jthread& t : pollers_) t.request_stop();
}

void RealEnvironment::run(std::span<const RunSlot> slots, double seconds) {
  struct Active {
    Fuzzer* fuzzer;
    double cores;
    bool throttled;  // duty-cycled below full share
    bool running = true;
  };
  std::vector<Active> active;

  for (const RunSlot& slot : slots) {
    Fuzzer& fuzzer = *rigs_[slot.rig].fuzzer;
    if (fuzzer.failed() || fuzzer.state() == FuzzerState::kStopped) {
      log_warn("env: skipping {} ({})", fuzzer.name(),
               fuzzer.failed() ? "failed" : "stopped");
      continue;
    }
    fuzzer.resume();
    if (slot.instances != fuzzer.instances()) {
      try {
        fuzzer.scale_to(slot.instances);
      } catch (const Error& e) {
        log_warn("env: {}", e.what());
      }
    }
    bool throttled = false;
    if (limiter_ != nullptr) {
      auto* pf = dynamic_cast<ProcessFuzzer*>(&fuzzer);
      limiter_->apply(fuzzer.name(),
                      pf != nullptr ? pf->pids() : std::vector<pid_t>{},
                      slot.cores);
    } else {
      // Duty cycling: the instance group runs cores/instances of the time.
      throttled = slot.cores / std::max(1, slot.instances) < 0.999;
    }
    active.push_back({&fuzzer, slot.cores, throttled});
  }

  const auto start = std::chrono::steady_clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<std::chrono::nanoseconds>(
                  std::chrono::duration<double>(seconds));

  while (std::chrono::steady_clock::now() < deadline) {
    const auto window_end =
        std::min(deadline, std::chrono::steady_clock::now() + kDutyWindow);
    for (Active& a : active) {
      if (!a.throttled) continue;
      const double share =
          a.cores / std::max(1, a.fuzzer->instances());
      const auto run_for = std::chrono::duration_cast<
          std::chrono::steady_clock::duration>(kDutyWindow * share);
      if (a.fuzzer->state() == FuzzerState::kPaused) a.fuzzer->resume();
      std::this_thread::sleep_until(
          std::min(window_end, std::chrono::steady_clock::now() + run_for));
      a.fuzzer->pause();
    }
    std::this_thread::sleep_until(window_end);
  }

  // Bill by assignment (wall seconds times assigned share), then park
  // everyone. add_cpu only counts while Running, so bill before pausing.
  for (Active& a : active) {
    if (a.fuzzer->state() == FuzzerState::kPaused) a.fuzzer->resume();
    a.fuzzer->add_cpu(a.cores * seconds);
    a.fuzzer->pause();
    if (limiter_ != nullptr) limiter_->clear(a.fuzzer->name());
    cpu_ += a.cores * seconds;
  }
}

void RealEnvironment::drain() {
  for (FuzzerRig& rig : rigs_) {
    rig.monitor->drain();
  }
}

}  // namespace fuzzmux
