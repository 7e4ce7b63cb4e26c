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

// Minimal stderr logger. Campaign telemetry goes to structured files; this is
// only for operator-facing progress and warnings, so it stays deliberately
// small (no sinks, no config, one global level).

#ifndef FUZZMUX_LOG_HPP_
#define FUZZMUX_LOG_HPP_

#include <fmt/core.h>

#include <string>

namespace fuzzmux {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();

namespace internal {
void log_line(LogLevel level, const std::string& message);
}  // namespace internal

template <typename... Args>
void log_debug(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() <= LogLevel::kDebug) {
    internal::log_line(LogLevel::kDebug,
                       fmt::format(f, std::forward<Args>(args)...));
  }
}

template <typename... Args>
void log_info(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() <= LogLevel::kInfo) {
    internal::log_line(LogLevel::kInfo,
                       fmt::format(f, std::forward<Args>(args)...));
  }
}

template <typename... Args>
void log_warn(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() <= LogLevel::kWarn) {
    internal::log_line(LogLevel::kWarn,
                       fmt::format(f, std::forward<Args>(args)...));
  }
}

template <typename... Args>
void log_error(fmt::format_string<Args...> f, Args&&... args) {
  internal::log_line(LogLevel::kError,
                     fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace fuzzmux

#endif  // FUZZMUX_LOG_HPP_
