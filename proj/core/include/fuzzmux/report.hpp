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

// Post-campaign reporting. Both commands are read-only over campaign data:
// `report` renders one campaign directory into DIR/report/ (a human round
// table plus machine-readable CSVs), `compare` ranks several campaign
// directories by the union coverage of their final bitmaps.

#ifndef FUZZMUX_REPORT_HPP_
#define FUZZMUX_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace fuzzmux {

// Renders DIR/rounds.jsonl into DIR/report/{round_table.txt,rounds.csv,
// allocation_matrix.csv} and prints the table. Corrupt telemetry lines are
// skipped with a warning; a missing rounds.jsonl is an error.
// Returns a process exit code: 0 on success, 2 on unusable input.
int cli_report(const std::filesystem::path& dir);

// Ranks campaign directories by the entry count of the union of their
// bitmaps/*.bitmap files, densest first; equal counts share a rank and are
// marked as ties. Returns 0 on success, 2 on unusable input.
int cli_compare(const std::vector<std::filesystem::path>& dirs);

}  // namespace fuzzmux

#endif  // FUZZMUX_REPORT_HPP_
