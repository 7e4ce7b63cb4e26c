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

// Simulation model for scheduler experiments: a universe of branches, and
// per-fuzzer discovery profiles. Discovery of each branch is a Poisson first
// arrival: a fuzzer holding b's parents discovers b within CPU time dt with
// probability 1 - exp(-rate * dt). Rates vary per branch (bands) and over
// campaign time (phase windows on the global CPU-budget fraction), which is
// enough to model dominant, inverting, and complementary fuzzer ensembles.
//
// A simulated seed file is a canonical text encoding of the branch set it
// covers: sorted unique decimal ids, one per line. Equal sets produce equal
// bytes, so content hashing dedups exactly.

#ifndef FUZZMUX_SIM_HPP_
#define FUZZMUX_SIM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fuzzmux {

struct BranchUniverse {
  std::uint32_t n_branches = 0;
  std::size_t map_size = 0;  // power of two, >= n_branches
  // parents_of[b]: branches that must all be visible before b can be found.
  // Empty vector: b is a root.
  std::vector<std::vector<std::uint32_t>> parents_of;
};

// Rate override for branches in [from, to).
struct RateBand {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double rate = 0.0;
};

// Rate multiplier while global CPU progress is in [from_frac, to_frac).
struct PhaseWindow {
  double from_frac = 0.0;
  double to_frac = 1.0;
  double multiplier = 1.0;
};

struct SimProfile {
  std::string name;
  double base_rate = 0.0;
  std::vector<RateBand> bands;      // later bands win on overlap
  std::vector<PhaseWindow> phases;  // later windows win on overlap

  double rate_for(std::uint32_t branch) const;
  double multiplier_at(double budget_frac) const;
  // Integral of the multiplier over [from_frac, to_frac), in fraction units.
  double multiplier_integral(double from_frac, double to_frac) const;
};

struct Scenario {
  std::string name;
  BranchUniverse universe;
  std::vector<SimProfile> profiles;
};

// Canonical seed encoding: sorted unique ids, "\n"-terminated decimal lines.
std::string encode_sim_seed(std::vector<std::uint32_t> branches);
// nullopt on malformed content (non-digit lines, out-of-range ids).
std::optional<std::vector<std::uint32_t>> decode_sim_seed(
    const std::string& content, std::uint32_t n_branches);

// Built-in scenario library.
std::vector<std::string> scenario_names();
Scenario builtin_scenario(const std::string& name);
// A known name, or a path to a scenario JSON file.
Scenario load_scenario(const std::string& name_or_path);

}  // namespace fuzzmux

#endif  // FUZZMUX_SIM_HPP_
