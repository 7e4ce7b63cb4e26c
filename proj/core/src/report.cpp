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

#include "fuzzmux/report.hpp"

#include <algorithm>
#include <cstdio>

#include <fmt/format.h>

#include "fuzzmux/bitmap.hpp"
#include "fuzzmux/log.hpp"
#include "fuzzmux/telemetry.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

namespace {

// Fuzzer names in first-seen order across all rounds, so the allocation
// matrix has stable columns even if the member set ever changed.
std::vector<std::string> fuzzer_columns(const std::vector<RoundRecord>& rounds) {
  std::vector<std::string> names;
  for (const RoundRecord& r : rounds) {
    for (const auto& [name, _] : r.allocation) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(name);
      }
    }
  }
  return names;
}

std::string render_round_table(const std::vector<RoundRecord>& rounds) {
  std::string out;
  out += fmt::format("{:>5}  {:<24} {:>9} {:>10} {:>8} {:>8}\n", "round",
                     "winner", "diff_peak", "theta", "t_prep", "t_focus");
  for (const RoundRecord& r : rounds) {
    out += fmt::format("{:>5}  {:<24} {:>9} {:>10.2f} {:>8.1f} {:>8.1f}\n",
                       r.round, r.winner, r.diff_peak, r.theta,
                       r.t_prep_actual, r.t_focus_assigned);
  }
  return out;
}

std::string render_rounds_csv(const std::vector<RoundRecord>& rounds) {
  std::string out =
      "round,winner,diff_peak,theta,t_prep_actual,t_focus_assigned\n";
  for (const RoundRecord& r : rounds) {
    out += fmt::format("{},{},{},{},{},{}\n", r.round, r.winner, r.diff_peak,
                       r.theta, r.t_prep_actual, r.t_focus_assigned);
  }
  return out;
}

std::string render_allocation_matrix(const std::vector<RoundRecord>& rounds,
                                     const std::vector<std::string>& names) {
  std::string out = "round";
  for (const std::string& name : names) out += "," + name;
  out += "\n";
  for (const RoundRecord& r : rounds) {
    out += fmt::format("{}", r.round);
    for (const std::string& name : names) {
      const auto it = std::find_if(
          r.allocation.begin(), r.allocation.end(),
          [&](const auto& entry) { return entry.first == name; });
      if (it == r.allocation.end()) {
        out += ",";
      } else {
        out += fmt::format(",{}", it->second);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace

int cli_report(const std::filesystem::path& dir) {
  std::vector<std::string> warnings;
  std::vector<RoundRecord> rounds;
  try {
    rounds = read_rounds(dir / "rounds.jsonl", &warnings);
  } catch (const std::exception& e) {
    log_error("report: {}", e.what());
    return 2;
  }
  for (const std::string& w : warnings) log_warn("report: {}", w);

  const std::filesystem::path report_dir = dir / "report";
  std::filesystem::create_directories(report_dir);

  const std::string table = render_round_table(rounds);
  write_file_atomic(report_dir / "round_table.txt", table);
  write_file_atomic(report_dir / "rounds.csv", render_rounds_csv(rounds));
  write_file_atomic(report_dir / "allocation_matrix.csv",
                    render_allocation_matrix(rounds, fuzzer_columns(rounds)));

  fmt::print("{}", table);
  fmt::print("{} rounds -> {}\n", rounds.size(), report_dir.string());
  return 0;
}

int cli_compare(const std::vector<std::filesystem::path>& dirs) {
  struct Entry {
    std::filesystem::path dir;
    std::uint64_t count = 0;
    double density = 0.0;
  };
  std::vector<Entry> entries;

  for (const std::filesystem::path& dir : dirs) {
    const auto files = list_files_sorted(dir / "bitmaps");
    if (files.empty()) {
      log_error("compare: no bitmap files under {}", (dir / "bitmaps").string());
      return 2;
    }
    CoverageBitmap merged;
    bool first = true;
    for (const std::filesystem::path& file : files) {
      if (file.extension() != ".bitmap") continue;
      const auto size = std::filesystem::file_size(file);
      CoverageBitmap map;
      try {
        map = CoverageBitmap::deserialize_from(file,
                                               static_cast<std::size_t>(size));
      } catch (const std::exception& e) {
        log_error("compare: {}", e.what());
        return 2;
      }
      if (first) {
        merged = std::move(map);
        first = false;
      } else if (map.size() != merged.size()) {
        log_error("compare: bitmap size mismatch under {}", dir.string());
        return 2;
      } else {
        merged.union_into(map);
      }
    }
    if (first) {
      log_error("compare: no .bitmap files under {}", (dir / "bitmaps").string());
      return 2;
    }
    entries.push_back({dir, merged.count(CountGranularity::kEntries),
                       merged.density(CountGranularity::kEntries)});
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.count > b.count;
                   });

  fmt::print("{:>4}  {:>10} {:>9}  {}\n", "rank", "entries", "density", "dir");
  int rank = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool tied = i > 0 && entries[i].count == entries[i - 1].count;
    if (!tied) rank = static_cast<int>(i) + 1;
    fmt::print("{:>4}  {:>10} {:>8.4f}%  {}{}\n", rank, entries[i].count,
               entries[i].density * 100.0, entries[i].dir.string(),
               tied ? "  (tie)" : "");
  }
  return 0;
}

}  // namespace fuzzmux
