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

// CPU-share enforcement for real fuzzer processes. The scheduler only deals
// in fractions; a limiter turns "0.4 of N cores" into an OS mechanism.
//
//  - DutyCycleLimiter: portable fallback. The environment runs fuzzers in
//    SIGSTOP/SIGCONT duty cycles, so apply() is pure bookkeeping here.
//  - CgroupLimiter: cgroup v2 backend. Writes cpu.max quotas under a
//    caller-supplied hierarchy root and moves fuzzer pids into per-fuzzer
//    groups. The filesystem layout is plain files, so it is testable against
//    a scratch directory without a real cgroup mount.

#ifndef FUZZMUX_LIMITER_HPP_
#define FUZZMUX_LIMITER_HPP_

#include <sys/types.h>

#include <filesystem>
#include <string>
#include <vector>

namespace fuzzmux {

class ResourceLimiter {
 public:
  virtual ~ResourceLimiter() = default;

  // Caps `name` (with the given live pids) at `cores` worth of CPU.
  virtual void apply(const std::string& name, const std::vector<pid_t>& pids,
                     double cores) = 0;

  // Lifts any cap for `name`.
  virtual void clear(const std::string& name) = 0;
};

class DutyCycleLimiter : public ResourceLimiter {
 public:
  void apply(const std::string& name, const std::vector<pid_t>& pids,
             double cores) override;
  void clear(const std::string& name) override;

  double assigned(const std::string& name) const;

 private:
  std::vector<std::pair<std::string, double>> assigned_;
};

class CgroupLimiter : public ResourceLimiter {
 public:
  // `root` is an existing cgroup v2 directory this process may manage,
  // e.g. /sys/fs/cgroup/fuzzmux.
  explicit CgroupLimiter(std::filesystem::path root,
                         long period_us = 100000);

  void apply(const std::string& name, const std::vector<pid_t>& pids,
             double cores) override;
  void clear(const std::string& name) override;

  // The exact cpu.max payload for a given cap; exposed for tests.
  std::string cpu_max_payload(double cores) const;

 private:
  std::filesystem::path group_dir(const std::string& name) const;

  const std::filesystem::path root_;
  const long period_us_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_LIMITER_HPP_
