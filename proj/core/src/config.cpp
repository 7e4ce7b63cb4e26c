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

#include "fuzzmux/config.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "fuzzmux/util.hpp"

namespace fuzzmux {

using ordered_json = nlohmann::ordered_json;

Policy parse_policy(const std::string& name) {
  if (name == "autofz") return Policy::kAutofz;
  if (name == "roundrobin") return Policy::kRoundRobin;
  throw ConfigError("unknown policy '" + name +
                    "' (expected autofz or roundrobin)");
}

const char* policy_name(Policy policy) {
  return policy == Policy::kAutofz ? "autofz" : "roundrobin";
}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

CountGranularity parse_granularity(const std::string& name) {
  if (name == "entries") return CountGranularity::kEntries;
  if (name == "bits") return CountGranularity::kBits;
  throw ConfigError("count_granularity must be 'entries' or 'bits'");
}

SubtractMode parse_subtract(const std::string& name) {
  if (name == "bucket_bits") return SubtractMode::kBucketBits;
  if (name == "entries") return SubtractMode::kEntries;
  throw ConfigError("subtract_mode must be 'bucket_bits' or 'entries'");
}

DiffSource parse_diff_source(const std::string& name) {
  if (name == "raw") return DiffSource::kRawCounts;
  if (name == "unique") return DiffSource::kUniqueCounts;
  throw ConfigError("diff_source must be 'raw' or 'unique'");
}

CoverageChannel parse_channel(const std::string& name) {
  if (name == "file") return CoverageChannel::kFile;
  if (name == "shm") return CoverageChannel::kSysVShm;
  throw ConfigError("target.channel must be 'file' or 'shm'");
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
  try {
    // stoull accepts and wraps negative input; refuse it up front.
    if (value.find('-') != std::string::npos) {
      throw std::invalid_argument(value);
    }
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + value +
                      "'");
  }
}

}  // namespace

CampaignConfig parse_config(const std::string& text,
                            const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ":" +
                      std::to_string(line_of_offset(text, e.byte)) + ": " +
                      e.what());
  }

  CampaignConfig config;
  try {
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      if (mode == "sim") {
        config.mode = CampaignMode::kSim;
      } else if (mode == "exec") {
        config.mode = CampaignMode::kExec;
      } else {
        throw ConfigError("mode must be 'sim' or 'exec'");
      }
    }
    config.scenario = j.value("scenario", config.scenario);
    ScheduleConfig& s = config.schedule;
    s.total_cpu_budget = j.value("cpu_budget", s.total_cpu_budget);
    s.cores = j.value("cores", s.cores);
    if (j.contains("policy")) {
      s.policy = parse_policy(j.at("policy").get<std::string>());
    }
    config.rng_seed = j.value("seed", config.rng_seed);
    config.output_dir = j.value("output", config.output_dir);
    s.t_prep = j.value("t_prep", s.t_prep);
    s.t_focus = j.value("t_focus", s.t_focus);
    s.theta_init = j.value("theta_init", s.theta_init);
    s.slice = j.value("slice", s.slice);
    if (j.contains("count_granularity")) {
      s.count_granularity =
          parse_granularity(j.at("count_granularity").get<std::string>());
    }
    if (j.contains("subtract_mode")) {
      s.subtract_mode =
          parse_subtract(j.at("subtract_mode").get<std::string>());
    }
    if (j.contains("diff_source")) {
      s.diff_source =
          parse_diff_source(j.at("diff_source").get<std::string>());
    }
    s.seed_sync_enabled = j.value("seed_sync", s.seed_sync_enabled);
    s.min_focus_slot = j.value("min_focus_slot", s.min_focus_slot);

    config.target.map_size = j.value("map_size", config.target.map_size);
    if (j.contains("target")) {
      const auto& t = j.at("target");
      config.target.binary = t.value("binary", std::string{});
      if (t.contains("argv")) {
        config.target.argv = t.at("argv").get<std::vector<std::string>>();
      }
      config.target.use_stdin = t.value("stdin", config.target.use_stdin);
      config.target.timeout_seconds =
          t.value("timeout", config.target.timeout_seconds);
      if (t.contains("channel")) {
        config.target.channel =
            parse_channel(t.at("channel").get<std::string>());
      }
    }
    if (j.contains("fuzzers")) {
      for (const auto& f : j.at("fuzzers")) {
        FuzzerSpec spec;
        spec.name = f.at("name").get<std::string>();
        spec.command = f.at("command").get<std::vector<std::string>>();
        if (f.contains("interesting_dirs")) {
          spec.interesting_subdirs =
              f.at("interesting_dirs").get<std::vector<std::string>>();
        }
        spec.sync_subdir = f.value("sync_dir", spec.sync_subdir);
        spec.max_instances = f.value("max_instances", spec.max_instances);
        config.fuzzers.push_back(std::move(spec));
      }
    }
    config.corpus_dir = j.value("corpus", std::string{});
    config.stop_grace_seconds = j.value("grace", config.stop_grace_seconds);
    config.cgroup_root = j.value("cgroup_root", config.cgroup_root);
    config.poll_interval_ms =
        j.value("poll_interval_ms", config.poll_interval_ms);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return config;
}

void apply_env_overrides(CampaignConfig& config) {
  auto env = [](const char* key) -> std::optional<std::string> {
    const char* v = std::getenv(key);
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };

  if (auto v = env("FUZZMUX_MODE")) {
    if (*v == "sim") {
      config.mode = CampaignMode::kSim;
    } else if (*v == "exec") {
      config.mode = CampaignMode::kExec;
    } else {
      throw ConfigError("FUZZMUX_MODE must be 'sim' or 'exec'");
    }
  }
  if (auto v = env("FUZZMUX_SCENARIO")) config.scenario = *v;
  ScheduleConfig& s = config.schedule;
  if (auto v = env("FUZZMUX_CPU_BUDGET")) {
    s.total_cpu_budget = parse_double(*v, "FUZZMUX_CPU_BUDGET");
  }
  if (auto v = env("FUZZMUX_CORES")) {
    s.cores = static_cast<int>(parse_u64(*v, "FUZZMUX_CORES"));
  }
  if (auto v = env("FUZZMUX_POLICY")) s.policy = parse_policy(*v);
  if (auto v = env("FUZZMUX_SEED")) {
    config.rng_seed = parse_u64(*v, "FUZZMUX_SEED");
  }
  if (auto v = env("FUZZMUX_OUTPUT")) config.output_dir = *v;
  if (auto v = env("FUZZMUX_T_PREP")) {
    s.t_prep = parse_double(*v, "FUZZMUX_T_PREP");
  }
  if (auto v = env("FUZZMUX_T_FOCUS")) {
    s.t_focus = parse_double(*v, "FUZZMUX_T_FOCUS");
  }
  if (auto v = env("FUZZMUX_THETA_INIT")) {
    s.theta_init = parse_double(*v, "FUZZMUX_THETA_INIT");
  }
  if (auto v = env("FUZZMUX_SLICE")) {
    s.slice = parse_double(*v, "FUZZMUX_SLICE");
  }
  if (auto v = env("FUZZMUX_COUNT_GRANULARITY")) {
    s.count_granularity = parse_granularity(*v);
  }
  if (auto v = env("FUZZMUX_SUBTRACT_MODE")) {
    s.subtract_mode = parse_subtract(*v);
  }
  if (auto v = env("FUZZMUX_DIFF_SOURCE")) {
    s.diff_source = parse_diff_source(*v);
  }
  if (auto v = env("FUZZMUX_SEED_SYNC")) {
    s.seed_sync_enabled = parse_bool(*v, "FUZZMUX_SEED_SYNC");
  }
  if (auto v = env("FUZZMUX_MIN_FOCUS_SLOT")) {
    s.min_focus_slot = parse_double(*v, "FUZZMUX_MIN_FOCUS_SLOT");
  }
  if (auto v = env("FUZZMUX_MAP_SIZE")) {
    config.target.map_size =
        static_cast<std::size_t>(parse_u64(*v, "FUZZMUX_MAP_SIZE"));
  }
  if (auto v = env("FUZZMUX_CORPUS")) config.corpus_dir = *v;
  if (auto v = env("FUZZMUX_GRACE")) {
    config.stop_grace_seconds = parse_double(*v, "FUZZMUX_GRACE");
  }
  if (auto v = env("FUZZMUX_CGROUP_ROOT")) config.cgroup_root = *v;
  if (auto v = env("FUZZMUX_POLL_INTERVAL_MS")) {
    config.poll_interval_ms =
        static_cast<int>(parse_u64(*v, "FUZZMUX_POLL_INTERVAL_MS"));
  }
}

void validate_config(const CampaignConfig& config) {
  const ScheduleConfig& s = config.schedule;
  if (s.t_prep < 1.0) throw ConfigError("t_prep must be >= 1 second");
  if (s.t_focus <= 0) throw ConfigError("t_focus must be positive");
  if (s.theta_init <= 0) throw ConfigError("theta_init must be positive");
  if (s.slice <= 0) throw ConfigError("slice must be positive");
  if (s.slice > s.t_prep) throw ConfigError("slice must not exceed t_prep");
  if (s.total_cpu_budget <= 0) throw ConfigError("cpu_budget must be positive");
  if (s.cores < 1) throw ConfigError("cores must be >= 1");
  if (s.min_focus_slot < 0) throw ConfigError("min_focus_slot must be >= 0");
  if (config.output_dir.empty()) throw ConfigError("output dir is empty");

  if (config.mode == CampaignMode::kSim) {
    if (config.scenario.empty()) throw ConfigError("scenario is empty");
    return;
  }

  if (config.fuzzers.empty()) {
    throw ConfigError("exec mode needs at least one fuzzer");
  }
  std::vector<std::string> names;
  for (const FuzzerSpec& f : config.fuzzers) {
    if (f.name.empty() || f.name.find('/') != std::string::npos) {
      throw ConfigError("bad fuzzer name '" + f.name + "'");
    }
    if (f.command.empty()) {
      throw ConfigError("fuzzer " + f.name + ": empty command");
    }
    if (f.interesting_subdirs.empty()) {
      throw ConfigError("fuzzer " + f.name + ": no interesting dirs");
    }
    names.push_back(f.name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw ConfigError("duplicate fuzzer names");
  }
  if (config.target.binary.empty()) {
    throw ConfigError("exec mode needs target.binary");
  }
  if (config.target.timeout_seconds <= 0) {
    throw ConfigError("target.timeout must be positive");
  }
  const std::size_t map_size = config.target.map_size;
  if (map_size == 0 || (map_size & (map_size - 1)) != 0) {
    throw ConfigError("map_size must be a power of two");
  }
  if (config.stop_grace_seconds < 0) throw ConfigError("grace must be >= 0");
  if (config.poll_interval_ms < 1) {
    throw ConfigError("poll_interval_ms must be >= 1");
  }
}

CampaignConfig load_config(const std::filesystem::path& path) {
  CampaignConfig config = parse_config(read_file(path), path.string());
  apply_env_overrides(config);
  return config;
}

std::string config_to_json(const CampaignConfig& config) {
  const ScheduleConfig& s = config.schedule;
  ordered_json j;
  j["mode"] = config.mode == CampaignMode::kSim ? "sim" : "exec";
  j["scenario"] = config.scenario;
  j["cpu_budget"] = s.total_cpu_budget;
  j["cores"] = s.cores;
  j["policy"] = policy_name(s.policy);
  j["seed"] = config.rng_seed;
  j["output"] = config.output_dir;
  j["t_prep"] = s.t_prep;
  j["t_focus"] = s.t_focus;
  j["theta_init"] = s.theta_init;
  j["slice"] = s.slice;
  j["count_granularity"] =
      s.count_granularity == CountGranularity::kEntries ? "entries" : "bits";
  j["subtract_mode"] =
      s.subtract_mode == SubtractMode::kBucketBits ? "bucket_bits" : "entries";
  j["diff_source"] =
      s.diff_source == DiffSource::kRawCounts ? "raw" : "unique";
  j["seed_sync"] = s.seed_sync_enabled;
  j["min_focus_slot"] = s.min_focus_slot;
  if (config.mode == CampaignMode::kExec) {
    j["map_size"] = config.target.map_size;
    ordered_json t;
    t["binary"] = config.target.binary.string();
    t["argv"] = config.target.argv;
    t["stdin"] = config.target.use_stdin;
    t["timeout"] = config.target.timeout_seconds;
    t["channel"] =
        config.target.channel == CoverageChannel::kFile ? "file" : "shm";
    j["target"] = std::move(t);
    ordered_json fuzzers = ordered_json::array();
    for (const FuzzerSpec& f : config.fuzzers) {
      ordered_json fj;
      fj["name"] = f.name;
      fj["command"] = f.command;
      fj["interesting_dirs"] = f.interesting_subdirs;
      fj["sync_dir"] = f.sync_subdir;
      fj["max_instances"] = f.max_instances;
      fuzzers.push_back(std::move(fj));
    }
    j["fuzzers"] = std::move(fuzzers);
    j["corpus"] = config.corpus_dir.string();
    j["grace"] = config.stop_grace_seconds;
    j["cgroup_root"] = config.cgroup_root;
    j["poll_interval_ms"] = config.poll_interval_ms;
  }
  return j.dump(2) + "\n";
}

}  // namespace fuzzmux
