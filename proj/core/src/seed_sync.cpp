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

#include "fuzzmux/seed_sync.hpp"

#include <fstream>
#include <sstream>

#include "fuzzmux/log.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

SeedSyncer::SeedSyncer(std::filesystem::path index_file)
    : index_file_(std::move(index_file)) {}

void SeedSyncer::append_index_row(const std::string& hash,
                                  const std::string& origin, int round,
                                  std::uintmax_t size) {
  if (index_file_.empty()) return;
  std::ofstream out(index_file_, std::ios::app);
  out << hash << '\t' << origin << '\t' << round << '\t' << size << '\n';
}

void SeedSyncer::load_index() {
  if (index_file_.empty() || !std::filesystem::exists(index_file_)) return;
  std::istringstream in(read_file(index_file_));
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::string hash = line.substr(0, tab);
    if (!owners_by_hash_.contains(hash)) {
      owners_by_hash_.emplace(hash, SeedRecord{});
      hash_order_.push_back(std::move(hash));
    }
  }
}

void SeedSyncer::scan_fuzzer(Fuzzer& fuzzer, SyncStats& stats) {
  for (const std::filesystem::path& dir : fuzzer.watch_dirs()) {
    std::unordered_set<std::string>& scanned = scanned_names_[dir.string()];
    std::vector<std::string> fresh;
    for_each_file_name(dir, [&](const char* name) {
      if (!scanned.contains(name)) fresh.emplace_back(name);
    });
    // Only new names need hashing; sorting them keeps discovery order (and
    // hence the seed index) deterministic.
    std::sort(fresh.begin(), fresh.end());
    for (const std::string& name : fresh) {
      const std::filesystem::path file = dir / name;
      ++stats.files_scanned;
      std::string hash;
      std::uintmax_t size = 0;
      try {
        hash = sha256_hex_of_file(file);
        size = std::filesystem::file_size(file);
      } catch (const std::exception&) {
        // Raced with a writer; left unscanned so a later pass retries.
        ++stats.unreadable_skipped;
        log_warn("sync: skipping unreadable {}", file.string());
        continue;
      }
      scanned.insert(name);
      auto [it, inserted] = owners_by_hash_.try_emplace(hash);
      if (inserted) {
        hash_order_.push_back(hash);
        append_index_row(hash, fuzzer.name(), last_scan_round_, size);
      }
      it->second.owners.insert(fuzzer.name());
      source_by_hash_.try_emplace(hash, file);
    }
  }
}

void SeedSyncer::distribute(const std::vector<Fuzzer*>& fuzzers, int round,
                            SyncStats& stats) {
  (void)round;
  for (const std::string& hash : hash_order_) {
    SeedRecord& record = owners_by_hash_[hash];
    if (record.owners.empty()) continue;  // index-only entry, content unseen
    const auto source_it = source_by_hash_.find(hash);
    if (source_it == source_by_hash_.end()) continue;

    for (Fuzzer* fuzzer : fuzzers) {
      if (record.owners.contains(fuzzer->name())) continue;

      const std::string origin = *record.owners.begin();
      const std::string filename = hash.substr(0, 16) + ".from_" + origin;
      const std::filesystem::path dest = fuzzer->sync_dir() / filename;
      const std::filesystem::path tmp = dest.string() + ".part";
      std::error_code ec;
      std::filesystem::copy_file(
          source_it->second, tmp,
          std::filesystem::copy_options::overwrite_existing, ec);
      if (!ec) std::filesystem::rename(tmp, dest, ec);
      if (ec) {
        log_warn("sync: copy {} -> {} failed: {}",
                 source_it->second.string(), dest.string(), ec.message());
        continue;
      }
      // Our own copy is a stable source for future passes; the original
      // fuzzer may garbage-collect its file at any time.
      source_it->second = dest;
      record.owners.insert(fuzzer->name());
      scanned_names_[fuzzer->sync_dir().string()].insert(filename);
      ++stats.copies_made;
    }
  }
}

SyncStats SeedSyncer::sync_all(const std::vector<Fuzzer*>& fuzzers,
                               int round) {
  SyncStats stats;
  last_scan_round_ = round;
  for (Fuzzer* fuzzer : fuzzers) {
    scan_fuzzer(*fuzzer, stats);
  }
  distribute(fuzzers, round, stats);
  return stats;
}

SyncStats SeedSyncer::sync_from(Fuzzer& source,
                                const std::vector<Fuzzer*>& fuzzers,
                                int round) {
  SyncStats stats;
  last_scan_round_ = round;
  scan_fuzzer(source, stats);
  distribute(fuzzers, round, stats);
  return stats;
}

}  // namespace fuzzmux
