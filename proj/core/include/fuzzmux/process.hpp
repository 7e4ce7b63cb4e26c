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

// POSIX child-process supervision. Each child gets its own process group so
// that pause/resume/kill signals reach the whole tree a fuzzer may spawn.

#ifndef FUZZMUX_PROCESS_HPP_
#define FUZZMUX_PROCESS_HPP_

#include <sys/types.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fuzzmux {

struct SpawnOptions {
  std::filesystem::path cwd;                  // empty: inherit
  std::filesystem::path stdout_file;          // empty: /dev/null
  std::filesystem::path stderr_file;          // empty: /dev/null
  std::optional<std::filesystem::path> stdin_file;  // default: /dev/null
  std::vector<std::pair<std::string, std::string>> extra_env;
};

class ChildProcess {
 public:
  ChildProcess() = default;
  ~ChildProcess();

  ChildProcess(ChildProcess&& other) noexcept;
  ChildProcess& operator=(ChildProcess&& other) noexcept;
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  // Fork+exec. The child becomes its own process-group leader before exec.
  // An exec failure (missing binary, EACCES, ...) is reported synchronously
  // via a CLOEXEC pipe and thrown as Error.
  static ChildProcess spawn(const std::vector<std::string>& argv,
                            const SpawnOptions& options);

  pid_t pid() const { return pid_; }
  bool valid() const { return pid_ > 0; }

  // Reaps if exited; true while the child is still alive.
  bool alive();

  // Exit status once the child is gone (waited), if it exited normally.
  std::optional<int> exit_code() const { return exit_code_; }

  // Sends `sig` to the whole process group.
  void signal_group(int sig);

  // SIGTERM the group, wait up to grace_seconds, then SIGKILL stragglers.
  // Blocks until the direct child is reaped. Safe to call repeatedly.
  void terminate(double grace_seconds);

 private:
  void release();

  pid_t pid_ = -1;
  bool reaped_ = false;
  std::optional<int> exit_code_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_PROCESS_HPP_
