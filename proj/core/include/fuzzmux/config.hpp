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

// Campaign configuration: one JSON file, overridable per key by FUZZMUX_*
// environment variables, overridable again by CLI flags. Parse errors report
// the offending line.

#ifndef FUZZMUX_CONFIG_HPP_
#define FUZZMUX_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fuzzmux/fuzzer.hpp"
#include "fuzzmux/oracle.hpp"
#include "fuzzmux/scheduler.hpp"

namespace fuzzmux {

enum class CampaignMode { kSim, kExec };

struct CampaignConfig {
  CampaignMode mode = CampaignMode::kSim;
  ScheduleConfig schedule;
  std::uint64_t rng_seed = 1;
  std::string output_dir = "fuzzmux_out";

  // Simulation mode.
  std::string scenario = "uniform";  // built-in name or scenario file path

  // Exec mode.
  InstrumentedTarget target;
  std::vector<FuzzerSpec> fuzzers;
  std::filesystem::path corpus_dir;
  double stop_grace_seconds = 5.0;
  std::string cgroup_root;  // empty: duty-cycle throttling
  int poll_interval_ms = 500;
};

// Loads and validates. Applies FUZZMUX_* environment overrides for every
// scalar config key (e.g. FUZZMUX_CPU_BUDGET overrides "cpu_budget").
CampaignConfig load_config(const std::filesystem::path& path);

// Parses a JSON document (pre-read). Exposed for tests.
CampaignConfig parse_config(const std::string& text,
                            const std::string& origin);

void apply_env_overrides(CampaignConfig& config);
void validate_config(const CampaignConfig& config);

// Serializes the fully resolved config (for config_used.json).
std::string config_to_json(const CampaignConfig& config);

Policy parse_policy(const std::string& name);        // "autofz"|"roundrobin"
const char* policy_name(Policy policy);

}  // namespace fuzzmux

#endif  // FUZZMUX_CONFIG_HPP_
