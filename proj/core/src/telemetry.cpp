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

#include "fuzzmux/telemetry.hpp"

#include <fstream>

#include <fmt/core.h>
#include <json.hpp>

#include "fuzzmux/util.hpp"

namespace fuzzmux {

using ordered_json = nlohmann::ordered_json;

std::string round_record_to_json(const RoundRecord& record) {
  ordered_json j;
  j["round"] = record.round;
  j["winner"] = record.winner;
  j["diff_peak"] = record.diff_peak;
  j["theta"] = record.theta;
  j["t_prep_actual"] = record.t_prep_actual;
  j["t_focus_assigned"] = record.t_focus_assigned;
  ordered_json alloc = ordered_json::object();
  for (const auto& [name, fraction] : record.allocation) {
    alloc[name] = fraction;
  }
  j["allocation"] = std::move(alloc);
  ordered_json counts = ordered_json::object();
  for (const auto& [name, count] : record.counts) {
    counts[name] = count;
  }
  j["counts"] = std::move(counts);
  ordered_json focus = ordered_json::object();
  for (const auto& [name, cpu] : record.focus_cpu) {
    focus[name] = cpu;
  }
  j["focus_cpu"] = std::move(focus);
  return j.dump();
}

RoundRecord round_record_from_json(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("rounds.jsonl: ") + e.what());
  }
  RoundRecord record;
  try {
    record.round = j.at("round").get<int>();
    record.winner = j.at("winner").get<std::string>();
    record.diff_peak = j.at("diff_peak").get<std::int64_t>();
    record.theta = j.at("theta").get<double>();
    record.t_prep_actual = j.at("t_prep_actual").get<double>();
    record.t_focus_assigned = j.at("t_focus_assigned").get<double>();
    for (const auto& [name, v] : j.at("allocation").items()) {
      record.allocation.emplace_back(name, v.get<double>());
    }
    for (const auto& [name, v] : j.at("counts").items()) {
      record.counts.emplace_back(name, v.get<std::uint64_t>());
    }
    if (j.contains("focus_cpu")) {
      for (const auto& [name, v] : j.at("focus_cpu").items()) {
        record.focus_cpu.emplace_back(name, v.get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("rounds.jsonl: ") + e.what());
  }
  return record;
}

std::vector<RoundRecord> read_rounds(const std::filesystem::path& file,
                                     std::vector<std::string>* warnings) {
  std::ifstream in(file);
  if (!in) {
    throw Error("no rounds.jsonl at " + file.string());
  }
  std::vector<RoundRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(round_record_from_json(line));
    } catch (const Error& e) {
      if (warnings != nullptr) {
        warnings->push_back(fmt::format("{}:{}: {}", file.string(), line_no,
                                        e.what()));
      }
    }
  }
  return records;
}

TelemetryWriter::TelemetryWriter(std::filesystem::path dir)
    : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  if (!std::filesystem::exists(coverage_file())) {
    write_file(coverage_file(), "cpu_seconds,fuzzer,count,density\n");
  }
}

std::filesystem::path TelemetryWriter::rounds_file() const {
  return dir_ / "rounds.jsonl";
}

std::filesystem::path TelemetryWriter::coverage_file() const {
  return dir_ / "coverage.csv";
}

void TelemetryWriter::append_round(const RoundRecord& record) {
  std::ofstream out(rounds_file(), std::ios::app);
  out << round_record_to_json(record) << '\n';
  if (!out) throw Error("write failed: " + rounds_file().string());
}

void TelemetryWriter::append_coverage(double cpu_seconds,
                                      const std::string& fuzzer,
                                      std::uint64_t count, double density) {
  std::ofstream out(coverage_file(), std::ios::app);
  out << fmt::format("{},{},{},{}\n", cpu_seconds, fuzzer, count, density);
  if (!out) throw Error("write failed: " + coverage_file().string());
}

}  // namespace fuzzmux
