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

#include "fuzzmux/monitor.hpp"

#include <algorithm>
#include <sstream>

#include "fuzzmux/log.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

CorpusMonitor::CorpusMonitor(Fuzzer& fuzzer, ExecutionOracle& oracle)
    : fuzzer_(fuzzer), oracle_(oracle),
      accumulated_(oracle.map_size()) {}

bool CorpusMonitor::process_file(const std::filesystem::path& file) {
  const std::string key = file.string();
  {
    std::lock_guard lock(mu_);
    if (processed_paths_.contains(key)) return false;
  }

  std::string hash;
  try {
    hash = sha256_hex_of_file(file);
  } catch (const Error&) {
    // Raced with a writer or the file vanished; retry on a later scan.
    return false;
  }

  bool need_execute = false;
  {
    std::lock_guard lock(mu_);
    if (processed_paths_.contains(key)) return false;
    need_execute = !seen_hashes_.contains(hash);
    // Claim the hash before running so a concurrent scan cannot double-run.
    processed_paths_.emplace(key, hash);
    seen_hashes_.insert(hash);
  }
  if (!need_execute) return false;

  std::optional<RawHitMap> raw = oracle_.execute(file);
  std::lock_guard lock(mu_);
  ++executed_;
  if (!raw.has_value()) {
    // Crash/timeout/no-map: the input stays marked processed and coverage
    // is left untouched.
    ++failures_;
    log_debug("monitor {}: oracle failure on {}", fuzzer_.name(), key);
    return true;
  }
  if (raw->size() != accumulated_.size()) {
    ++failures_;
    log_warn("monitor {}: map size {} != {} for {}", fuzzer_.name(),
             raw->size(), accumulated_.size(), key);
    return true;
  }
  accumulated_.union_into(CoverageBitmap::bucketize(*raw));
  return true;
}

bool CorpusMonitor::is_recorded(const std::string& key) const {
  std::lock_guard lock(mu_);
  return processed_paths_.contains(key);
}

int CorpusMonitor::poll() {
  int executed = 0;
  for (const std::filesystem::path& dir : fuzzer_.watch_dirs()) {
    const std::string dir_key = dir.string();
    std::vector<std::string> fresh;
    {
      std::lock_guard lock(scan_mu_);
      const auto& seen = seen_names_[dir_key];
      for_each_file_name(dir, [&](const char* name) {
        if (!seen.contains(name)) fresh.emplace_back(name);
      });
    }
    if (fresh.empty()) continue;
    // Fresh files in filename order: old entries were already handled in
    // that order, so processing stays deterministic.
    std::sort(fresh.begin(), fresh.end());
    for (const std::string& name : fresh) {
      const std::filesystem::path file = dir / name;
      if (process_file(file)) ++executed;
      // Only recorded paths retire from scanning; an unreadable file (e.g. a
      // writer race) stays fresh and is retried on the next poll.
      if (is_recorded(file.string())) {
        std::lock_guard lock(scan_mu_);
        seen_names_[dir_key].insert(name);
      }
    }
  }
  return executed;
}

void CorpusMonitor::drain() {
  while (poll() > 0) {
  }
}

CoverageBitmap CorpusMonitor::snapshot() const {
  std::lock_guard lock(mu_);
  return accumulated_;
}

std::uint64_t CorpusMonitor::snapshot_count(
    CountGranularity granularity) const {
  std::lock_guard lock(mu_);
  return accumulated_.count(granularity);
}

std::uint64_t CorpusMonitor::inputs_processed() const {
  std::lock_guard lock(mu_);
  return executed_;
}

std::uint64_t CorpusMonitor::oracle_failures() const {
  std::lock_guard lock(mu_);
  return failures_;
}

void CorpusMonitor::save_state(const std::filesystem::path& ledger_file,
                               const std::filesystem::path& bitmap_file) const {
  std::vector<std::pair<std::string, std::string>> rows;
  {
    std::lock_guard lock(mu_);
    rows.assign(processed_paths_.begin(), processed_paths_.end());
    accumulated_.serialize_to(bitmap_file);
  }
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  for (const auto& [path, hash] : rows) {
    out << path << '\t' << hash << '\n';
  }
  write_file_atomic(ledger_file, out.str());
}

void CorpusMonitor::load_state(const std::filesystem::path& ledger_file,
                               const std::filesystem::path& bitmap_file) {
  std::lock_guard lock(mu_);
  accumulated_ =
      CoverageBitmap::deserialize_from(bitmap_file, oracle_.map_size());
  processed_paths_.clear();
  seen_hashes_.clear();
  std::istringstream in(read_file(ledger_file));
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::string path = line.substr(0, tab);
    std::string hash = line.substr(tab + 1);
    seen_hashes_.insert(hash);
    processed_paths_.emplace(std::move(path), std::move(hash));
  }
}

}  // namespace fuzzmux
