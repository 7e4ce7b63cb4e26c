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

// AFL-style coverage bitmaps and the algebra the scheduler runs on.
//
// A bitmap has one byte per edge-map entry. Raw per-entry hit counts are
// folded into hit-count buckets so that, e.g., "ran this edge 40 times" and
// "ran it 90 times" compare equal, while "once" and "twice" stay distinct:
//
//   hits:   0  1  2  3  4-7  8-15  16-31  32-127  128-255
//   bucket: -  b0 b1 b2 b3   b4    b5     b6      b7
//
// Unions accumulate coverage across inputs and fuzzers, intersections find
// the shared common core, and subtraction strips that core away to expose
// what a fuzzer contributes uniquely. Those three operations plus count()
// are the entire measurement surface the scheduling policy consumes.

#ifndef FUZZMUX_BITMAP_HPP_
#define FUZZMUX_BITMAP_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fuzzmux {

// Raw per-entry hit counts as produced by one target execution, saturated
// at 255 by the instrumentation.
using RawHitMap = std::vector<std::uint8_t>;

// Hit-count bucket lookup. Index: raw count. Value: bucket byte.
inline constexpr std::array<std::uint8_t, 256> kBucketLookup = [] {
  std::array<std::uint8_t, 256> t{};
  t[0] = 0x00;
  t[1] = 0x01;
  t[2] = 0x02;
  t[3] = 0x04;
  for (int i = 4; i <= 7; ++i) t[i] = 0x08;
  for (int i = 8; i <= 15; ++i) t[i] = 0x10;
  for (int i = 16; i <= 31; ++i) t[i] = 0x20;
  for (int i = 32; i <= 127; ++i) t[i] = 0x40;
  for (int i = 128; i <= 255; ++i) t[i] = 0x80;
  return t;
}();

// count() granularity. kEntries counts nonzero bytes (a map entry is covered
// or not); kBits counts set bucket bits (distinguishes hit-count refinement).
enum class CountGranularity { kEntries, kBits };

// subtract() semantics. kBucketBits removes exactly the bucket bits present
// in the subtrahend (AND-NOT per byte); kEntries zeroes any entry that is
// nonzero in the subtrahend.
enum class SubtractMode { kBucketBits, kEntries };

class CoverageBitmap {
 public:
  CoverageBitmap() = default;
  explicit CoverageBitmap(std::size_t map_size) : bytes_(map_size, 0) {}
  explicit CoverageBitmap(std::vector<std::uint8_t> bytes)
      : bytes_(std::move(bytes)) {}

  // Folds raw hit counts into their buckets. One byte per entry in, one out.
  static CoverageBitmap bucketize(const RawHitMap& raw);

  std::size_t size() const { return bytes_.size(); }
  bool empty_map() const { return bytes_.empty(); }
  const std::uint8_t* data() const { return bytes_.data(); }
  std::uint8_t operator[](std::size_t i) const { return bytes_[i]; }
  std::uint8_t& at(std::size_t i) { return bytes_.at(i); }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

  // this |= other. Sizes must match.
  void union_into(const CoverageBitmap& other);

  // Byte-wise AND over all maps. At least one map required; sizes must match.
  static CoverageBitmap intersect_all(
      std::span<const CoverageBitmap* const> maps);
  static CoverageBitmap intersect_all(std::span<const CoverageBitmap> maps);

  // this - other under the chosen mode; returns the difference.
  CoverageBitmap subtract(const CoverageBitmap& other,
                          SubtractMode mode = SubtractMode::kBucketBits) const;

  std::uint64_t count(
      CountGranularity granularity = CountGranularity::kEntries) const;

  // count / map_size. An empty map has density 0.
  double density(
      CountGranularity granularity = CountGranularity::kEntries) const;

  // Flat binary persistence: exactly map_size bytes, no header. The on-disk
  // layout doubles as the exchange format for externally produced bitmaps.
  void serialize_to(const std::filesystem::path& path) const;
  static CoverageBitmap deserialize_from(const std::filesystem::path& path,
                                         std::size_t expected_size);

  friend bool operator==(const CoverageBitmap& a,
                         const CoverageBitmap& b) = default;

 private:
  std::vector<std::uint8_t> bytes_;
};

}  // namespace fuzzmux

#endif  // FUZZMUX_BITMAP_HPP_
