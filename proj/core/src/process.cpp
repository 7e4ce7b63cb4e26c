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

#include "fuzzmux/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "fuzzmux/util.hpp"

namespace fuzzmux {

namespace {

[[noreturn]] void child_exec(const std::vector<std::string>& argv,
                             const SpawnOptions& options, int err_fd) {
  // Own process group, so signals hit the fuzzer and everything it spawns.
  setpgid(0, 0);

  auto redirect = [&](const std::filesystem::path& file, int flags, int fd) {
    const char* path = file.empty() ? "/dev/null" : file.c_str();
    int opened = open(path, flags, 0644);
    if (opened < 0 || dup2(opened, fd) < 0) {
      int err = errno;
      (void)!write(err_fd, &err, sizeof(err));
      _exit(127);
    }
    close(opened);
  };

  redirect(options.stdin_file.value_or(""), O_RDONLY, STDIN_FILENO);
  redirect(options.stdout_file, O_WRONLY | O_CREAT | O_APPEND, STDOUT_FILENO);
  redirect(options.stderr_file, O_WRONLY | O_CREAT | O_APPEND, STDERR_FILENO);

  if (!options.cwd.empty() && chdir(options.cwd.c_str()) != 0) {
    int err = errno;
    (void)!write(err_fd, &err, sizeof(err));
    _exit(127);
  }

  for (const auto& [k, v] : options.extra_env) {
    setenv(k.c_str(), v.c_str(), 1);
  }

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const std::string& a : argv) {
    cargv.push_back(const_cast<char*>(a.c_str()));
  }
  cargv.push_back(nullptr);

  execvp(cargv[0], cargv.data());
  int err = errno;
  (void)!write(err_fd, &err, sizeof(err));
  _exit(127);
}

}  // namespace

ChildProcess::~ChildProcess() {
  if (valid() && !reaped_) {
    terminate(0.5);
  }
}

ChildProcess::ChildProcess(ChildProcess&& other) noexcept { *this = std::move(other); }

ChildProcess& ChildProcess::operator=(ChildProcess&& other) noexcept {
  if (this != &other) {
    if (valid() && !reaped_) terminate(0.5);
    pid_ = other.pid_;
    reaped_ = other.reaped_;
    exit_code_ = other.exit_code_;
    other.release();
  }
  return *this;
}

void ChildProcess::release() {
  pid_ = -1;
  reaped_ = true;
  exit_code_.reset();
}

ChildProcess ChildProcess::spawn(const std::vector<std::string>& argv,
                                 const SpawnOptions& options) {
  if (argv.empty()) throw Error("spawn: empty argv");

  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw Error(std::string("spawn: pipe2: ") + std::strerror(errno));
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(err_pipe[0]);
    close(err_pipe[1]);
    throw Error(std::string("spawn: fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    close(err_pipe[0]);
    child_exec(argv, options, err_pipe[1]);
  }

  close(err_pipe[1]);
  // Mirror the child's setpgid to close the race from the parent side too.
  setpgid(pid, pid);

  int child_errno = 0;
  ssize_t n = read(err_pipe[0], &child_errno, sizeof(child_errno));
  close(err_pipe[0]);
  if (n > 0) {
    // Exec never happened; reap the stillborn child and report.
    int status = 0;
    waitpid(pid, &status, 0);
    throw Error("spawn " + argv[0] + ": " + std::strerror(child_errno));
  }

  ChildProcess child;
  child.pid_ = pid;
  child.reaped_ = false;
  return child;
}

bool ChildProcess::alive() {
  if (!valid() || reaped_) return false;
  int status = 0;
  pid_t r = waitpid(pid_, &status, WNOHANG);
  if (r == 0) return true;
  reaped_ = true;
  if (r == pid_ && WIFEXITED(status)) {
    exit_code_ = WEXITSTATUS(status);
  }
  return false;
}

void ChildProcess::signal_group(int sig) {
  if (!valid()) return;
  kill(-pid_, sig);
}

void ChildProcess::terminate(double grace_seconds) {
  if (!valid() || reaped_) return;
  // A stopped process cannot handle SIGTERM; wake the group first.
  kill(-pid_, SIGCONT);
  kill(-pid_, SIGTERM);

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::nanoseconds>(
                            std::chrono::duration<double>(grace_seconds));
  while (std::chrono::steady_clock::now() < deadline) {
    if (!alive()) {
      kill(-pid_, SIGKILL);  // sweep any orphaned group members
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }

  kill(-pid_, SIGKILL);
  if (!reaped_) {
    int status = 0;
    if (waitpid(pid_, &status, 0) == pid_) {
      reaped_ = true;
      if (WIFEXITED(status)) exit_code_ = WEXITSTATUS(status);
    }
  }
}

}  // namespace fuzzmux
