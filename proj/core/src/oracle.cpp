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

#include "fuzzmux/oracle.hpp"

#include <sys/ipc.h>
#include <sys/shm.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <thread>

#include "fuzzmux/fuzzer.hpp"
#include "fuzzmux/log.hpp"
#include "fuzzmux/process.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

InstrumentedBinaryOracle::InstrumentedBinaryOracle(InstrumentedTarget target)
    : target_(std::move(target)) {
  scratch_dir_ = std::filesystem::temp_directory_path() /
                 ("fuzzmux_oracle_" + std::to_string(getpid()));
  std::filesystem::create_directories(scratch_dir_);
}

InstrumentedBinaryOracle::~InstrumentedBinaryOracle() {
  std::error_code ec;
  std::filesystem::remove_all(scratch_dir_, ec);
}

std::vector<std::string> InstrumentedBinaryOracle::build_argv(
    const std::filesystem::path& input) const {
  std::vector<std::string> argv;
  argv.push_back(target_.binary.string());
  bool substituted = false;
  for (const std::string& arg : target_.argv) {
    if (arg.find("{input}") != std::string::npos) {
      std::string expanded = arg;
      const std::size_t at = expanded.find("{input}");
      expanded.replace(at, 7, input.string());
      argv.push_back(std::move(expanded));
      substituted = true;
    } else {
      argv.push_back(arg);
    }
  }
  if (!substituted && !target_.use_stdin) {
    argv.push_back(input.string());
  }
  return argv;
}

bool InstrumentedBinaryOracle::run_target(
    const std::vector<std::string>& argv, const std::filesystem::path& input,
    const std::vector<std::pair<std::string, std::string>>& env) {
  SpawnOptions opts;
  opts.extra_env = env;
  if (target_.use_stdin) opts.stdin_file = input;

  ChildProcess child;
  try {
    child = ChildProcess::spawn(argv, opts);
  } catch (const Error& e) {
    log_warn("oracle: {}", e.what());
    return false;
  }

  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::duration<double>(target_.timeout_seconds));
  while (child.alive()) {
    if (std::chrono::steady_clock::now() >= deadline) {
      ++timeouts_;
      child.terminate(0.1);
      return false;
    }
    std::this_thread::sleep_for(std::chrono::microseconds(200));
  }
  // A crash shows up as death-by-signal: no exit code was collected.
  if (!child.exit_code().has_value()) {
    ++crashes_;
    return false;
  }
  return true;
}

std::optional<RawHitMap> InstrumentedBinaryOracle::execute_with_file(
    const std::filesystem::path& input) {
  const std::filesystem::path map_file =
      scratch_dir_ / ("map_" + std::to_string(next_run_.fetch_add(1)));
  std::error_code ec;
  std::filesystem::remove(map_file, ec);

  if (!run_target(build_argv(input), input,
                  {{"FUZZMUX_COVERAGE_FILE", map_file.string()}})) {
    return std::nullopt;
  }

  std::string blob;
  try {
    blob = read_file(map_file);
  } catch (const Error&) {
    log_warn("oracle: target exited but wrote no coverage for {}",
             input.string());
    return std::nullopt;
  }
  if (blob.size() != target_.map_size) {
    log_warn("oracle: coverage size {} != map_size {} for {}", blob.size(),
             target_.map_size, input.string());
    return std::nullopt;
  }
  return RawHitMap(blob.begin(), blob.end());
}

std::optional<RawHitMap> InstrumentedBinaryOracle::execute_with_shm(
    const std::filesystem::path& input) {
  const int shm_id = shmget(IPC_PRIVATE, target_.map_size, IPC_CREAT | 0600);
  if (shm_id < 0) {
    throw Error(std::string("oracle: shmget: ") + std::strerror(errno));
  }
  void* mem = shmat(shm_id, nullptr, 0);
  if (mem == reinterpret_cast<void*>(-1)) {
    shmctl(shm_id, IPC_RMID, nullptr);
    throw Error(std::string("oracle: shmat: ") + std::strerror(errno));
  }
  std::memset(mem, 0, target_.map_size);

  const bool ok = run_target(build_argv(input), input,
                             {{"__AFL_SHM_ID", std::to_string(shm_id)}});

  std::optional<RawHitMap> result;
  if (ok) {
    const auto* bytes = static_cast<const std::uint8_t*>(mem);
    result = RawHitMap(bytes, bytes + target_.map_size);
  }
  shmdt(mem);
  shmctl(shm_id, IPC_RMID, nullptr);
  return result;
}

std::optional<RawHitMap> InstrumentedBinaryOracle::execute(
    const std::filesystem::path& input) {
  switch (target_.channel) {
    case CoverageChannel::kFile:
      return execute_with_file(input);
    case CoverageChannel::kSysVShm:
      return execute_with_shm(input);
  }
  return std::nullopt;
}

}  // namespace fuzzmux
