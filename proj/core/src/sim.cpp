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

#include "fuzzmux/sim.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <json.hpp>

#include "fuzzmux/util.hpp"

namespace fuzzmux {

double SimProfile::rate_for(std::uint32_t branch) const {
  double rate = base_rate;
  for (const RateBand& band : bands) {
    if (branch >= band.from && branch < band.to) rate = band.rate;
  }
  return rate;
}

double SimProfile::multiplier_at(double budget_frac) const {
  double mult = 1.0;
  for (const PhaseWindow& w : phases) {
    if (budget_frac >= w.from_frac && budget_frac < w.to_frac) {
      mult = w.multiplier;
    }
  }
  return mult;
}

double SimProfile::multiplier_integral(double from_frac,
                                       double to_frac) const {
  if (to_frac <= from_frac) return 0.0;
  // Piecewise-constant integration over window boundaries.
  std::vector<double> cuts{from_frac, to_frac};
  for (const PhaseWindow& w : phases) {
    if (w.from_frac > from_frac && w.from_frac < to_frac) {
      cuts.push_back(w.from_frac);
    }
    if (w.to_frac > from_frac && w.to_frac < to_frac) {
      cuts.push_back(w.to_frac);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    integral += multiplier_at(mid) * (cuts[i + 1] - cuts[i]);
  }
  return integral;
}

std::string encode_sim_seed(std::vector<std::uint32_t> branches) {
  std::sort(branches.begin(), branches.end());
  branches.erase(std::unique(branches.begin(), branches.end()),
                 branches.end());
  std::string out;
  for (std::uint32_t b : branches) {
    out += std::to_string(b);
    out += '\n';
  }
  return out;
}

std::optional<std::vector<std::uint32_t>> decode_sim_seed(
    const std::string& content, std::uint32_t n_branches) {
  std::vector<std::uint32_t> branches;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    if (eol == pos) return std::nullopt;  // empty line
    std::uint32_t value = 0;
    const char* first = content.data() + pos;
    const char* last = content.data() + eol;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value >= n_branches) {
      return std::nullopt;
    }
    branches.push_back(value);
    pos = eol + 1;
  }
  return branches;
}

namespace {

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Layered chains: `width` parallel lines, each `layers` deep, occupying
// branches [first, first + layers*width). Branch b in layer k>0 depends on
// b - width in layer k-1.
void add_chains(BranchUniverse& u, std::uint32_t first, std::uint32_t layers,
                std::uint32_t width) {
  for (std::uint32_t layer = 1; layer < layers; ++layer) {
    for (std::uint32_t i = 0; i < width; ++i) {
      const std::uint32_t child = first + layer * width + i;
      u.parents_of.at(child).push_back(child - width);
    }
  }
}

BranchUniverse flat_universe(std::uint32_t n, std::size_t map_size) {
  BranchUniverse u;
  u.n_branches = n;
  u.map_size = map_size;
  u.parents_of.assign(n, {});
  return u;
}

Scenario make_dominant() {
  Scenario s;
  s.name = "dominant";
  s.universe = flat_universe(32768, 32768);
  s.profiles = {
      {.name = "dominant", .base_rate = 1.8e-4},
      {.name = "steady_a", .base_rate = 1.2e-5},
      {.name = "steady_b", .base_rate = 1.2e-5},
  };
  return s;
}

Scenario make_uniform() {
  Scenario s;
  s.name = "uniform";
  s.universe = flat_universe(16384, 16384);
  s.profiles = {
      {.name = "twin_a", .base_rate = 2e-5},
      {.name = "twin_b", .base_rate = 2e-5},
      {.name = "twin_c", .base_rate = 2e-5},
  };
  return s;
}

Scenario make_inversion() {
  Scenario s;
  s.name = "inversion";
  s.universe = flat_universe(8192, 8192);
  s.profiles = {
      {.name = "early_bird",
       .base_rate = 4e-5,
       .phases = {{0.0, 0.5, 8.0}, {0.5, 1.01, 0.125}}},
      {.name = "late_bloomer",
       .base_rate = 4e-5,
       .phases = {{0.0, 0.5, 0.125}, {0.5, 1.01, 8.0}}},
  };
  return s;
}

Scenario make_complementary() {
  Scenario s;
  s.name = "complementary";
  s.universe = flat_universe(8192, 8192);
  // Two arms of 16 layers x 256 chains; progress is frontier-limited, so
  // coverage grows roughly linearly in the CPU a specialist receives.
  add_chains(s.universe, 0, 16, 256);
  add_chains(s.universe, 4096, 16, 256);
  s.profiles = {
      {.name = "arm_a_specialist",
       .base_rate = 2.5e-6,
       .bands = {{0, 4096, 1e-3}}},
      {.name = "arm_b_specialist",
       .base_rate = 2.5e-6,
       .bands = {{4096, 8192, 1e-3}}},
      {.name = "generalist", .base_rate = 2e-5},
  };
  return s;
}

Scenario make_deadweight() {
  Scenario s = make_dominant();
  s.name = "deadweight";
  s.profiles.push_back({.name = "idle", .base_rate = 0.0});
  return s;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", "custom");
  const auto n = j.at("n_branches").get<std::uint32_t>();
  const auto map_size = j.value("map_size", std::size_t{0});
  s.universe = flat_universe(n, map_size == 0 ? n : map_size);

  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      const auto parent = e.at(0).get<std::uint32_t>();
      const auto child = e.at(1).get<std::uint32_t>();
      if (parent >= n || child >= n) {
        throw ConfigError("scenario: edge branch out of range");
      }
      s.universe.parents_of[child].push_back(parent);
    }
  }
  if (j.contains("chains")) {
    for (const auto& c : j.at("chains")) {
      add_chains(s.universe, c.at("first").get<std::uint32_t>(),
                 c.at("layers").get<std::uint32_t>(),
                 c.at("width").get<std::uint32_t>());
    }
  }

  for (const auto& f : j.at("fuzzers")) {
    SimProfile p;
    p.name = f.at("name").get<std::string>();
    p.base_rate = f.at("base_rate").get<double>();
    if (f.contains("bands")) {
      for (const auto& b : f.at("bands")) {
        p.bands.push_back({b.at("from").get<std::uint32_t>(),
                           b.at("to").get<std::uint32_t>(),
                           b.at("rate").get<double>()});
      }
    }
    if (f.contains("phases")) {
      for (const auto& w : f.at("phases")) {
        p.phases.push_back({w.at("from").get<double>(),
                            w.at("to").get<double>(),
                            w.at("multiplier").get<double>()});
      }
    }
    s.profiles.push_back(std::move(p));
  }
  if (s.profiles.empty()) {
    throw ConfigError("scenario: no fuzzers defined");
  }
  if (!is_pow2(s.universe.map_size) ||
      s.universe.map_size < s.universe.n_branches) {
    throw ConfigError("scenario: map_size must be a power of two >= n_branches");
  }
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"dominant", "uniform", "inversion", "complementary", "deadweight"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "dominant") return make_dominant();
  if (name == "uniform") return make_uniform();
  if (name == "inversion") return make_inversion();
  if (name == "complementary") return make_complementary();
  if (name == "deadweight") return make_deadweight();
  throw ConfigError("unknown scenario: " + name);
}

Scenario load_scenario(const std::string& name_or_path) {
  const auto names = scenario_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return builtin_scenario(name_or_path);
  }
  if (!std::filesystem::exists(name_or_path)) {
    throw ConfigError("scenario '" + name_or_path +
                      "' is neither a built-in name nor a file");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(name_or_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario " + name_or_path + ": " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario " + name_or_path + ": " + e.what());
  }
}

}  // namespace fuzzmux
