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

// Coverage measurement for corpus files. All per-fuzzer bitmaps are produced
// by one shared oracle, so trends compare like with like no matter which
// fuzzer found an input. A campaign uses exactly one oracle mode: an
// instrumented target binary, or the simulation harness.

#ifndef FUZZMUX_ORACLE_HPP_
#define FUZZMUX_ORACLE_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fuzzmux/bitmap.hpp"

namespace fuzzmux {

class ExecutionOracle {
 public:
  virtual ~ExecutionOracle() = default;

  // Runs one input. nullopt means the target crashed, hung past its timeout,
  // or produced no usable map; the caller records the input as processed
  // without touching coverage.
  virtual std::optional<RawHitMap> execute(
      const std::filesystem::path& input) = 0;

  virtual std::size_t map_size() const = 0;
};

// How the instrumented target hands its hit map back.
enum class CoverageChannel {
  kFile,     // target writes map_size raw bytes to $FUZZMUX_COVERAGE_FILE
  kSysVShm,  // AFL protocol: target attaches to $__AFL_SHM_ID and writes there
};

struct InstrumentedTarget {
  std::filesystem::path binary;
  // argv template; {input} is replaced by the corpus file path. When absent
  // and use_stdin is false, the path is appended as the last argument.
  std::vector<std::string> argv;
  bool use_stdin = false;
  double timeout_seconds = 1.0;
  std::size_t map_size = 65536;
  CoverageChannel channel = CoverageChannel::kFile;
};

class InstrumentedBinaryOracle : public ExecutionOracle {
 public:
  explicit InstrumentedBinaryOracle(InstrumentedTarget target);
  ~InstrumentedBinaryOracle() override;

  std::optional<RawHitMap> execute(const std::filesystem::path& input) override;
  std::size_t map_size() const override { return target_.map_size; }

  std::uint64_t crashes_seen() const { return crashes_; }
  std::uint64_t timeouts_seen() const { return timeouts_; }

 private:
  std::optional<RawHitMap> execute_with_file(
      const std::filesystem::path& input);
  std::optional<RawHitMap> execute_with_shm(
      const std::filesystem::path& input);
  std::vector<std::string> build_argv(const std::filesystem::path& input) const;
  // Runs the target; true when it exited (any code) within the timeout.
  bool run_target(const std::vector<std::string>& argv,
                  const std::filesystem::path& input,
                  const std::vector<std::pair<std::string, std::string>>& env);

  const InstrumentedTarget target_;
  std::filesystem::path scratch_dir_;
  std::atomic<std::uint64_t> next_run_{0};  // executes may race across monitors
  std::atomic<std::uint64_t> crashes_{0};
  std::atomic<std::uint64_t> timeouts_{0};
};

}  // namespace fuzzmux

#endif  // FUZZMUX_ORACLE_HPP_
