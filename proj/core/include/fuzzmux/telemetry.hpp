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

// Campaign telemetry files:
//   rounds.jsonl  - one JSON object per round, fixed key order.
//   coverage.csv  - per-fuzzer coverage series keyed by campaign CPU seconds.
// Both are append-only; identical campaigns produce byte-identical files.

#ifndef FUZZMUX_TELEMETRY_HPP_
#define FUZZMUX_TELEMETRY_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "fuzzmux/scheduler.hpp"

namespace fuzzmux {

// Single-line JSON encoding (no trailing newline).
std::string round_record_to_json(const RoundRecord& record);

// Parses one rounds.jsonl line. Throws Error on malformed input.
RoundRecord round_record_from_json(const std::string& line);

// Reads a whole rounds.jsonl. Corrupt lines are skipped with a warning
// pushed to `warnings` (when non-null), so partial telemetry still reports.
std::vector<RoundRecord> read_rounds(const std::filesystem::path& file,
                                     std::vector<std::string>* warnings);

class TelemetryWriter {
 public:
  explicit TelemetryWriter(std::filesystem::path dir);

  void append_round(const RoundRecord& record);
  void append_coverage(double cpu_seconds, const std::string& fuzzer,
                       std::uint64_t count, double density);

  std::filesystem::path rounds_file() const;
  std::filesystem::path coverage_file() const;

 private:
  const std::filesystem::path dir_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_TELEMETRY_HPP_
