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

#include "fuzzmux/process_fuzzer.hpp"

#include <signal.h>

#include "fuzzmux/log.hpp"

namespace fuzzmux {

ProcessFuzzer::ProcessFuzzer(FuzzerSpec spec, std::filesystem::path root_dir,
                             ProcessFuzzerOptions options)
    : Fuzzer(std::move(spec), std::move(root_dir)),
      options_(std::move(options)) {}

ProcessFuzzer::~ProcessFuzzer() {
  for (ChildProcess& c : children_) {
    c.terminate(options_.stop_grace_seconds);
  }
}

std::vector<pid_t> ProcessFuzzer::pids() const {
  std::vector<pid_t> out;
  for (const ChildProcess& c : children_) {
    if (c.valid()) out.push_back(c.pid());
  }
  return out;
}

ChildProcess ProcessFuzzer::spawn_instance(int id) {
  const std::filesystem::path instance_out =
      id == 0 ? root() : root() / ("instance_" + std::to_string(id));
  std::filesystem::create_directories(instance_out);

  const std::vector<std::string> argv = expand_command(
      spec().command, {{"target", options_.target.string()},
                       {"in", options_.input_dir.string()},
                       {"out", instance_out.string()},
                       {"id", std::to_string(id)}});

  SpawnOptions spawn_opts;
  spawn_opts.cwd = root();
  spawn_opts.stdout_file = root() / ("instance_" + std::to_string(id) + ".out");
  spawn_opts.stderr_file = root() / ("instance_" + std::to_string(id) + ".err");
  return ChildProcess::spawn(argv, spawn_opts);
}

void ProcessFuzzer::do_start() {
  children_.clear();
  children_.push_back(spawn_instance(0));
  paused_children_ = false;
}

void ProcessFuzzer::do_stop() {
  for (ChildProcess& c : children_) {
    c.terminate(options_.stop_grace_seconds);
  }
  children_.clear();
  paused_children_ = false;
}

void ProcessFuzzer::do_pause() {
  for (ChildProcess& c : children_) {
    c.signal_group(SIGSTOP);
  }
  paused_children_ = true;
}

void ProcessFuzzer::do_resume() {
  for (ChildProcess& c : children_) {
    c.signal_group(SIGCONT);
  }
  paused_children_ = false;
}

void ProcessFuzzer::do_scale_to(int n) {
  while (static_cast<int>(children_.size()) > n) {
    children_.back().terminate(options_.stop_grace_seconds);
    children_.pop_back();
  }
  while (static_cast<int>(children_.size()) < n) {
    ChildProcess child = spawn_instance(static_cast<int>(children_.size()));
    if (paused_children_) child.signal_group(SIGSTOP);
    children_.push_back(std::move(child));
  }
}

}  // namespace fuzzmux
