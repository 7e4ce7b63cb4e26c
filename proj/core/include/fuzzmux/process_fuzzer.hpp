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

// Adapter for real fuzzer child processes. Instances are independent copies
// of the spec'd command (distinct {id}), each in its own process group.
// Pause/resume map to SIGSTOP/SIGCONT on those groups; stop gives the group
// a grace period on SIGTERM before SIGKILL.

#ifndef FUZZMUX_PROCESS_FUZZER_HPP_
#define FUZZMUX_PROCESS_FUZZER_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "fuzzmux/fuzzer.hpp"
#include "fuzzmux/process.hpp"

namespace fuzzmux {

struct ProcessFuzzerOptions {
  std::filesystem::path target;     // substituted for {target}
  std::filesystem::path input_dir;  // substituted for {in}
  double stop_grace_seconds = 5.0;
};

class ProcessFuzzer : public Fuzzer {
 public:
  ProcessFuzzer(FuzzerSpec spec, std::filesystem::path root_dir,
                ProcessFuzzerOptions options);
  ~ProcessFuzzer() override;

  // Live pids, for limiter backends that track group membership.
  std::vector<pid_t> pids() const;

 protected:
  void do_start() override;
  void do_stop() override;
  void do_pause() override;
  void do_resume() override;
  void do_scale_to(int n) override;

 private:
  ChildProcess spawn_instance(int id);

  const ProcessFuzzerOptions options_;
  std::vector<ChildProcess> children_;
  bool paused_children_ = false;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_PROCESS_FUZZER_HPP_
