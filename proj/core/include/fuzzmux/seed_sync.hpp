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

// Seed synchronization across baseline fuzzers. Every interesting input
// (queue entries, crashes, hangs alike) is identified by its SHA-256; any
// fuzzer missing that content receives a copy in its sync dir. Copies, not
// links: fuzzers may mutate or garbage-collect their own corpora. Sync is
// idempotent, never imports a fuzzer's own finds back into it, and after a
// full pass every fuzzer's visible corpus is the union of all corpora.

#ifndef FUZZMUX_SEED_SYNC_HPP_
#define FUZZMUX_SEED_SYNC_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fuzzmux/fuzzer.hpp"

namespace fuzzmux {

struct SyncStats {
  int files_scanned = 0;
  int copies_made = 0;
  int unreadable_skipped = 0;
};

class SeedSyncer {
 public:
  // index_file: line-oriented ledger of known seeds; empty path disables
  // persistence (tests).
  explicit SeedSyncer(std::filesystem::path index_file = {});

  // Full pass: everyone's finds flow to everyone else.
  SyncStats sync_all(const std::vector<Fuzzer*>& fuzzers, int round);

  // Focus-phase variant: the fuzzer that just ran publishes its finds to all
  // peers (and picks up anything it does not have yet).
  SyncStats sync_from(Fuzzer& source, const std::vector<Fuzzer*>& fuzzers,
                      int round);

  // Number of distinct seed contents seen so far.
  std::size_t known_seeds() const { return owners_by_hash_.size(); }

  void load_index();

 private:
  struct SeedRecord {
    std::set<std::string> owners;  // fuzzers whose corpus holds this content
  };

  // Scans one fuzzer's corpus (watch dirs) and registers ownership.
  void scan_fuzzer(Fuzzer& fuzzer, SyncStats& stats);
  void distribute(const std::vector<Fuzzer*>& fuzzers, int round,
                  SyncStats& stats);
  void append_index_row(const std::string& hash, const std::string& origin,
                        int round, std::uintmax_t size);

  const std::filesystem::path index_file_;
  int last_scan_round_ = 0;  // round stamped onto new index rows
  // hash -> ownership; insertion-ordered by discovery via hash_order_.
  std::unordered_map<std::string, SeedRecord> owners_by_hash_;
  std::vector<std::string> hash_order_;
  // hash -> a readable file holding that content (copy source).
  std::unordered_map<std::string, std::filesystem::path> source_by_hash_;
  // Per watch dir, the filenames already scanned: repeat scans over a large
  // corpus skip old entries by name instead of re-listing and re-hashing.
  std::unordered_map<std::string, std::unordered_set<std::string>>
      scanned_names_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_SEED_SYNC_HPP_
