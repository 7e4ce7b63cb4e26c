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

#include "fuzzmux/fuzzer.hpp"

#include "fuzzmux/log.hpp"

namespace fuzzmux {

const char* to_string(FuzzerState state) {
  switch (state) {
    case FuzzerState::kStopped:
      return "stopped";
    case FuzzerState::kRunning:
      return "running";
    case FuzzerState::kPaused:
      return "paused";
  }
  return "unknown";
}

std::vector<std::string> expand_command(
    const std::vector<std::string>& argv_template,
    const std::vector<std::pair<std::string, std::string>>& vars) {
  std::vector<std::string> out;
  out.reserve(argv_template.size());
  for (const std::string& arg : argv_template) {
    std::string expanded;
    std::size_t pos = 0;
    while (pos < arg.size()) {
      const std::size_t open = arg.find('{', pos);
      if (open == std::string::npos) {
        expanded.append(arg, pos, std::string::npos);
        break;
      }
      const std::size_t close = arg.find('}', open);
      if (close == std::string::npos) {
        expanded.append(arg, pos, std::string::npos);
        break;
      }
      expanded.append(arg, pos, open - pos);
      const std::string key = arg.substr(open + 1, close - open - 1);
      bool known = false;
      for (const auto& [k, v] : vars) {
        if (k == key) {
          expanded += v;
          known = true;
          break;
        }
      }
      if (!known) {
        throw ConfigError("unknown placeholder {" + key + "} in command: " +
                          arg);
      }
      pos = close + 1;
    }
    out.push_back(std::move(expanded));
  }
  return out;
}

Fuzzer::Fuzzer(FuzzerSpec spec, std::filesystem::path root_dir)
    : spec_(std::move(spec)), root_(std::move(root_dir)) {
  std::filesystem::create_directories(root_);
  for (const std::string& sub : spec_.interesting_subdirs) {
    std::filesystem::create_directories(root_ / sub);
  }
  std::filesystem::create_directories(root_ / spec_.sync_subdir);
}

FuzzerState Fuzzer::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

int Fuzzer::instances() const {
  std::lock_guard lock(mu_);
  return instances_;
}

bool Fuzzer::failed() const {
  std::lock_guard lock(mu_);
  return failed_;
}

double Fuzzer::cpu_time_consumed() const {
  std::lock_guard lock(mu_);
  return cpu_seconds_;
}

std::vector<std::filesystem::path> Fuzzer::watch_dirs() const {
  std::vector<std::filesystem::path> dirs;
  for (const std::string& sub : spec_.interesting_subdirs) {
    dirs.push_back(root_ / sub);
  }
  dirs.push_back(root_ / spec_.sync_subdir);
  return dirs;
}

std::filesystem::path Fuzzer::sync_dir() const {
  return root_ / spec_.sync_subdir;
}

std::filesystem::path Fuzzer::queue_dir() const {
  return root_ / spec_.interesting_subdirs.front();
}

void Fuzzer::start() {
  std::lock_guard lock(mu_);
  if (failed_) {
    throw Error("fuzzer " + spec_.name + ": refusing to start after failure");
  }
  if (state_ != FuzzerState::kStopped) {
    throw Error("fuzzer " + spec_.name + ": start while " +
                to_string(state_));
  }
  try {
    do_start();
  } catch (const std::exception& e) {
    failed_ = true;
    log_warn("fuzzer {}: start failed: {}", spec_.name, e.what());
    throw;
  }
  state_ = FuzzerState::kRunning;
  instances_ = 1;
}

void Fuzzer::stop() {
  std::lock_guard lock(mu_);
  if (state_ == FuzzerState::kStopped) return;
  do_stop();
  state_ = FuzzerState::kStopped;
  instances_ = 0;
}

void Fuzzer::pause() {
  std::lock_guard lock(mu_);
  if (state_ == FuzzerState::kPaused) return;
  if (state_ != FuzzerState::kRunning) {
    throw Error("fuzzer " + spec_.name + ": pause while " +
                to_string(state_));
  }
  do_pause();
  state_ = FuzzerState::kPaused;
}

void Fuzzer::resume() {
  std::lock_guard lock(mu_);
  if (state_ == FuzzerState::kRunning) return;
  if (state_ != FuzzerState::kPaused) {
    throw Error("fuzzer " + spec_.name + ": resume while " +
                to_string(state_));
  }
  do_resume();
  state_ = FuzzerState::kRunning;
}

void Fuzzer::scale_to(int n) {
  std::lock_guard lock(mu_);
  if (state_ != FuzzerState::kRunning) {
    throw Error("fuzzer " + spec_.name + ": scale_to while " +
                to_string(state_));
  }
  if (n < 1 || n > spec_.max_instances) {
    throw Error("fuzzer " + spec_.name + ": instance count " +
                std::to_string(n) + " out of range");
  }
  if (n == instances_) return;
  do_scale_to(n);
  instances_ = n;
}

void Fuzzer::add_cpu(double seconds) {
  std::lock_guard lock(mu_);
  if (state_ == FuzzerState::kRunning && seconds > 0) {
    cpu_seconds_ += seconds;
  }
}

void Fuzzer::restore_cpu(double seconds) {
  std::lock_guard lock(mu_);
  cpu_seconds_ = seconds;
}

void Fuzzer::mark_failed(const std::string& reason) {
  std::lock_guard lock(mu_);
  failed_ = true;
  log_warn("fuzzer {}: marked failed: {}", spec_.name, reason);
}

}  // namespace fuzzmux
