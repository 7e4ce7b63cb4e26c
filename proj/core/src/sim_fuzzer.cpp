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

#include "fuzzmux/sim_fuzzer.hpp"

#include <cmath>
#include <fstream>

#include <fmt/core.h>

#include "fuzzmux/log.hpp"
#include "fuzzmux/util.hpp"

namespace fuzzmux {

std::optional<RawHitMap> SimOracle::execute(
    const std::filesystem::path& input) {
  std::string content;
  try {
    content = read_file(input);
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto branches = decode_sim_seed(content, universe_.n_branches);
  if (!branches.has_value()) {
    return std::nullopt;
  }
  RawHitMap raw(universe_.map_size, 0);
  for (std::uint32_t b : *branches) {
    raw[b] = 1;
  }
  return raw;
}

SimFuzzer::SimFuzzer(FuzzerSpec spec, std::filesystem::path root_dir,
                     const Scenario& scenario, std::size_t profile_index,
                     std::uint64_t campaign_seed)
    : Fuzzer(std::move(spec), std::move(root_dir)),
      scenario_(scenario),
      profile_(scenario.profiles.at(profile_index)),
      campaign_seed_(campaign_seed),
      stream_id_(profile_index),
      own_(scenario.universe.n_branches, false),
      visible_(scenario.universe.n_branches, false) {
  // Reconstruct discovery state from whatever is already on disk, so a
  // resumed campaign continues where the files say it stopped.
  refresh_visible();
}

bool SimFuzzer::unlocked(std::uint32_t branch) const {
  for (std::uint32_t parent : scenario_.universe.parents_of[branch]) {
    if (!visible_[parent]) return false;
  }
  return true;
}

void SimFuzzer::emit_seed(std::uint32_t branch) {
  const std::string name = fmt::format("id_{:08}", next_file_id_++);
  write_file(queue_dir() / name, encode_sim_seed({branch}));
  scanned_names_[queue_dir().string()].insert(name);
}

void SimFuzzer::refresh_visible() {
  // Queue first: it seeds next_file_id_ on resume. Sync after: imports.
  for (const std::filesystem::path& dir : watch_dirs()) {
    std::unordered_set<std::string>& scanned = scanned_names_[dir.string()];
    std::vector<std::string> fresh;
    for_each_file_name(dir, [&](const char* name) {
      if (!scanned.contains(name)) fresh.emplace_back(name);
    });
    std::sort(fresh.begin(), fresh.end());
    const bool own_dir = dir == queue_dir();
    for (const std::string& name : fresh) {
      const std::filesystem::path file = dir / name;
      scanned.insert(name);
      std::string content;
      try {
        content = read_file(file);
      } catch (const Error&) {
        continue;
      }
      const auto branches =
          decode_sim_seed(content, scenario_.universe.n_branches);
      if (!branches.has_value()) continue;
      for (std::uint32_t b : *branches) {
        if (own_dir && !own_[b]) {
          own_[b] = true;
          ++own_count_;
        }
        visible_[b] = true;
      }
      if (own_dir) {
        // Keep file ids monotone past anything already present.
        const std::string stem = file.stem().string();
        if (stem.starts_with("id_")) {
          const std::uint64_t id = std::strtoull(stem.c_str() + 3, nullptr, 10);
          next_file_id_ = std::max(next_file_id_, id + 1);
        }
      }
    }
  }
}

int SimFuzzer::advance(double cpu_seconds, double global_from,
                       double global_to, double total_budget, int round) {
  if (cpu_seconds <= 0) return 0;
  if (round != last_round_) {
    last_round_ = round;
    advance_in_round_ = 0;
  }
  DetRng rng(mix_seed({campaign_seed_, stream_id_,
                       static_cast<std::uint64_t>(round),
                       static_cast<std::uint64_t>(advance_in_round_)}));
  ++advance_in_round_;

  // Integrated phase multiplier over this fuzzer's share of the global span.
  const double from_frac =
      total_budget > 0 ? std::min(global_from / total_budget, 1.0) : 0.0;
  const double to_frac =
      total_budget > 0 ? std::min(global_to / total_budget, 1.0) : 1.0;
  double mult_integral = profile_.multiplier_integral(from_frac, to_frac);
  double effective_dt;
  if (to_frac > from_frac) {
    effective_dt = cpu_seconds * (mult_integral / (to_frac - from_frac));
  } else {
    effective_dt = cpu_seconds * profile_.multiplier_at(from_frac);
  }

  // Snapshot eligibility first: children unlocked by this very advance wait
  // for the next one.
  std::vector<std::uint32_t> eligible;
  for (std::uint32_t b = 0; b < scenario_.universe.n_branches; ++b) {
    if (!visible_[b] && unlocked(b)) eligible.push_back(b);
  }

  int found = 0;
  double cached_rate = -1.0;
  double cached_p = 0.0;
  for (std::uint32_t b : eligible) {
    const double rate = profile_.rate_for(b);
    if (rate <= 0) continue;
    if (rate != cached_rate) {
      cached_rate = rate;
      cached_p = 1.0 - std::exp(-rate * effective_dt);
    }
    if (rng.next_unit() < cached_p) {
      own_[b] = true;
      visible_[b] = true;
      ++own_count_;
      emit_seed(b);
      ++found;
    }
  }
  return found;
}

std::uint64_t SimFuzzer::own_discovered_count() const { return own_count_; }

SimEnvironment::SimEnvironment(std::span<FuzzerRig> rigs, double total_budget,
                               double start_cpu)
    : rigs_(rigs), budget_(total_budget), cpu_(start_cpu) {}

void SimEnvironment::run(std::span<const RunSlot> slots, double seconds) {
  if (seconds <= 0) return;
  double total = 0.0;
  for (const RunSlot& slot : slots) total += slot.cores * seconds;
  const double span_start = cpu_;
  const double span_end = cpu_ + total;

  for (const RunSlot& slot : slots) {
    FuzzerRig& rig = rigs_[slot.rig];
    Fuzzer& fuzzer = *rig.fuzzer;
    if (fuzzer.failed() || fuzzer.state() == FuzzerState::kStopped) {
      log_warn("sim env: skipping {}", fuzzer.name());
      continue;
    }
    if (fuzzer.state() == FuzzerState::kPaused) fuzzer.resume();
    if (slot.instances != fuzzer.instances()) fuzzer.scale_to(slot.instances);

    auto& sim = static_cast<SimFuzzer&>(fuzzer);
    sim.refresh_visible();
    sim.advance(slot.cores * seconds, span_start, span_end, budget_, round_);
    fuzzer.add_cpu(slot.cores * seconds);
    fuzzer.pause();
  }
  cpu_ = span_end;
}

void SimEnvironment::drain() {
  for (FuzzerRig& rig : rigs_) {
    rig.monitor->drain();
  }
}

}  // namespace fuzzmux
