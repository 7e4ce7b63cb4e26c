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

#include "fuzzmux/limiter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fuzzmux/log.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

void DutyCycleLimiter::apply(const std::string& name,
                             const std::vector<pid_t>& pids, double cores) {
  (void)pids;
  auto it = std::find_if(assigned_.begin(), assigned_.end(),
                         [&](const auto& kv) { return kv.first == name; });
  if (it == assigned_.end()) {
    assigned_.emplace_back(name, cores);
  } else {
    it->second = cores;
  }
}

void DutyCycleLimiter::clear(const std::string& name) {
  std::erase_if(assigned_, [&](const auto& kv) { return kv.first == name; });
}

double DutyCycleLimiter::assigned(const std::string& name) const {
  for (const auto& [k, v] : assigned_) {
    if (k == name) return v;
  }
  return 0.0;
}

CgroupLimiter::CgroupLimiter(std::filesystem::path root, long period_us)
    : root_(std::move(root)), period_us_(period_us) {}

std::filesystem::path CgroupLimiter::group_dir(const std::string& name) const {
  return root_ / name;
}

std::string CgroupLimiter::cpu_max_payload(double cores) const {
  if (cores <= 0) {
    // Zero share: the scheduler never runs such a fuzzer, but a zero quota
    // must not mean "unlimited", so cap at the smallest accepted quota.
    return "1000 " + std::to_string(period_us_) + "\n";
  }
  const long quota =
      std::max<long>(1000, std::lround(cores * static_cast<double>(period_us_)));
  return std::to_string(quota) + " " + std::to_string(period_us_) + "\n";
}

void CgroupLimiter::apply(const std::string& name,
                          const std::vector<pid_t>& pids, double cores) {
  const std::filesystem::path dir = group_dir(name);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error("cgroup: cannot create " + dir.string() + ": " + ec.message());
  }
  write_file(dir / "cpu.max", cpu_max_payload(cores));
  // cgroup.procs accepts one pid per write.
  for (pid_t pid : pids) {
    std::ofstream procs(dir / "cgroup.procs", std::ios::app);
    procs << pid << "\n";
    if (!procs) {
      log_warn("cgroup: failed to move pid {} into {}", pid, dir.string());
    }
  }
}

void CgroupLimiter::clear(const std::string& name) {
  const std::filesystem::path dir = group_dir(name);
  if (std::filesystem::exists(dir)) {
    write_file(dir / "cpu.max", "max " + std::to_string(period_us_) + "\n");
  }
}

}  // namespace fuzzmux
