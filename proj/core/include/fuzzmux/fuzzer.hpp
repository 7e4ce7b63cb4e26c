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

// Baseline-fuzzer adapter interface. The scheduler treats every fuzzer as an
// opaque box with a lifecycle (start/stop/pause/resume/scale) and a handful
// of directories it drops interesting inputs into. Concrete adapters wrap
// real child processes or simulated fuzzers behind the same surface.

#ifndef FUZZMUX_FUZZER_HPP_
#define FUZZMUX_FUZZER_HPP_

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "fuzzmux/util.hpp"

namespace fuzzmux {

enum class FuzzerState { kStopped, kRunning, kPaused };

const char* to_string(FuzzerState state);

// Static description of one baseline fuzzer. The command is an argv template;
// {target}, {in}, {out} and {id} are substituted at spawn time ({id} is the
// instance index, so multi-instance runs get distinct output subdirs).
struct FuzzerSpec {
  std::string name;
  std::vector<std::string> command;
  std::vector<std::string> interesting_subdirs{"queue", "crashes", "hangs"};
  std::string sync_subdir = "sync";
  int max_instances = 64;
};

// Substitutes {placeholder} tokens in an argv template. Unknown placeholders
// are a config error; literal braces do not need escaping unless they form
// a known token.
std::vector<std::string> expand_command(
    const std::vector<std::string>& argv_template,
    const std::vector<std::pair<std::string, std::string>>& vars);

// Adapter base class. Guards the lifecycle state machine and the CPU-time
// ledger; concrete adapters implement the do_* hooks. All public methods are
// safe to call from a thread other than the creating one.
class Fuzzer {
 public:
  Fuzzer(FuzzerSpec spec, std::filesystem::path root_dir);
  virtual ~Fuzzer() = default;

  Fuzzer(const Fuzzer&) = delete;
  Fuzzer& operator=(const Fuzzer&) = delete;

  const FuzzerSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  const std::filesystem::path& root() const { return root_; }

  FuzzerState state() const;
  int instances() const;
  bool failed() const;
  double cpu_time_consumed() const;

  // Directories the corpus monitor watches. The sync dir is included: seeds
  // imported from peers must flow into this fuzzer's coverage too.
  std::vector<std::filesystem::path> watch_dirs() const;
  std::filesystem::path sync_dir() const;
  std::filesystem::path queue_dir() const;

  // Stopped -> Running with one instance. Starting a running or paused
  // fuzzer is an illegal transition. A spawn failure marks the fuzzer failed
  // and rethrows; failed fuzzers refuse further starts.
  void start();
  // Any state -> Stopped. Idempotent.
  void stop();
  // Running -> Paused (no-op when already paused; illegal when stopped).
  void pause();
  // Paused -> Running (no-op when already running; illegal when stopped).
  void resume();
  // Adjusts the live instance count. Only legal while Running.
  void scale_to(int n);

  // CPU accounting hook driven by the environment: wall seconds times the
  // core fraction assigned for that span. Only Running time is ever billed.
  void add_cpu(double seconds);

  // Resume hook: reinstates the cumulative counter saved by a previous run
  // so per-phase deltas taken against it reproduce the one-shot arithmetic.
  void restore_cpu(double seconds);

 protected:
  virtual void do_start() = 0;
  virtual void do_stop() = 0;
  virtual void do_pause() = 0;
  virtual void do_resume() = 0;
  virtual void do_scale_to(int n) = 0;

  // For adapters that discover failure asynchronously.
  void mark_failed(const std::string& reason);

 private:
  const FuzzerSpec spec_;
  const std::filesystem::path root_;

  mutable std::mutex mu_;
  FuzzerState state_ = FuzzerState::kStopped;
  int instances_ = 0;
  bool failed_ = false;
  double cpu_seconds_ = 0.0;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_FUZZER_HPP_
