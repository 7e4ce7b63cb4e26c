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

// Per-fuzzer corpus monitor. Watches the fuzzer's interesting dirs (queue,
// crashes, hangs) plus its sync dir, executes every new input through the
// shared oracle exactly once, and folds the bucketized result into the
// fuzzer's accumulated coverage bitmap. Inputs are deduplicated by content
// hash; the (path, hash) ledger survives restarts so resumed campaigns never
// re-execute old corpus files.

#ifndef FUZZMUX_MONITOR_HPP_
#define FUZZMUX_MONITOR_HPP_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fuzzmux/bitmap.hpp"
#include "fuzzmux/fuzzer.hpp"
#include "fuzzmux/oracle.hpp"

namespace fuzzmux {

class CorpusMonitor {
 public:
  CorpusMonitor(Fuzzer& fuzzer, ExecutionOracle& oracle);

  CorpusMonitor(const CorpusMonitor&) = delete;
  CorpusMonitor& operator=(const CorpusMonitor&) = delete;

  // One scan over all watch dirs. Returns the number of inputs executed.
  // Safe to call concurrently with snapshot(); scans tolerate files appearing
  // or vanishing mid-walk.
  int poll();

  // Polls until a scan finds nothing new (new files can land while a scan
  // is in flight, e.g. right after a seed sync).
  void drain();

  const std::string& fuzzer_name() const { return fuzzer_.name(); }

  // Copy of the accumulated coverage.
  CoverageBitmap snapshot() const;
  std::uint64_t snapshot_count(CountGranularity granularity) const;

  std::uint64_t inputs_processed() const;
  std::uint64_t oracle_failures() const;

  // Restart support: the ledger of processed (path, hash) pairs plus the
  // accumulated bitmap round-trip through these.
  void save_state(const std::filesystem::path& ledger_file,
                  const std::filesystem::path& bitmap_file) const;
  void load_state(const std::filesystem::path& ledger_file,
                  const std::filesystem::path& bitmap_file);

 private:
  bool process_file(const std::filesystem::path& file);
  bool is_recorded(const std::string& key) const;

  Fuzzer& fuzzer_;
  ExecutionOracle& oracle_;

  // Scan bookkeeping: per watch dir, the filenames whose paths are already in
  // processed_paths_. Lets a poll enumerate a big stable corpus without
  // building paths or re-sorting it; only fresh names pay full processing.
  mutable std::mutex scan_mu_;
  std::unordered_map<std::string, std::unordered_set<std::string>> seen_names_;

  mutable std::mutex mu_;
  CoverageBitmap accumulated_;
  // Filenames already handled, keyed by path string: lets a scan skip old
  // entries without re-hashing them.
  std::unordered_map<std::string, std::string> processed_paths_;
  // Content hashes already executed: the same input arriving under a second
  // path (sync copy, fuzzer restart) is recorded but not re-executed.
  std::unordered_set<std::string> seen_hashes_;
  std::uint64_t executed_ = 0;
  std::uint64_t failures_ = 0;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_MONITOR_HPP_
