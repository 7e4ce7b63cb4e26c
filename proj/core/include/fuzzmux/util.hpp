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

#ifndef FUZZMUX_UTIL_HPP_
#define FUZZMUX_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuzzmux {

// Base error type for everything that can go wrong at runtime (IO, config,
// process control). The CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// SHA-256 of a byte span / file, as a lowercase hex string.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& bytes);
std::string sha256_hex_of_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Atomic-enough replace: write to a sibling temp file, then rename over the
// destination so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

// Regular files directly under `dir`, sorted by filename. Directory scans feed
// deterministic outputs, so the OS iteration order must never leak through.
std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& dir);

// Calls fn(name) for every regular file directly under `dir`, in OS order.
// The corpus scanners repeat over directories that grow to tens of thousands
// of entries; this avoids the per-entry path construction and whole-listing
// sort of list_files_sorted. Callers that keep names must sort what they
// keep. A missing dir reads as empty.
void for_each_file_name(const std::filesystem::path& dir,
                        const std::function<void(const char*)>& fn);

// splitmix64 step; used to derive independent RNG streams from a campaign seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Collapses an arbitrary set of stream labels into one 64-bit seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// Thin deterministic RNG. std::mt19937_64 output is pinned by the standard;
// the derived draws below avoid std::*_distribution, whose mapping is not.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n) without modulo bias.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_UTIL_HPP_
