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

#include "fuzzmux/bitmap.hpp"

#include <bit>
#include <fstream>

#include "fuzzmux/util.hpp"

namespace fuzzmux {

CoverageBitmap CoverageBitmap::bucketize(const RawHitMap& raw) {
  CoverageBitmap out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.bytes_[i] = kBucketLookup[raw[i]];
  }
  return out;
}

void CoverageBitmap::union_into(const CoverageBitmap& other) {
  if (other.size() != size()) {
    throw std::invalid_argument("union_into: size mismatch");
  }
  for (std::size_t i = 0; i < bytes_.size(); ++i) {
    bytes_[i] |= other.bytes_[i];
  }
}

CoverageBitmap CoverageBitmap::intersect_all(
    std::span<const CoverageBitmap* const> maps) {
  if (maps.empty()) {
    throw std::invalid_argument("intersect_all: no maps");
  }
  CoverageBitmap out = *maps.front();
  for (std::size_t m = 1; m < maps.size(); ++m) {
    const CoverageBitmap& next = *maps[m];
    if (next.size() != out.size()) {
      throw std::invalid_argument("intersect_all: size mismatch");
    }
    for (std::size_t i = 0; i < out.bytes_.size(); ++i) {
      out.bytes_[i] &= next.bytes_[i];
    }
  }
  return out;
}

CoverageBitmap CoverageBitmap::intersect_all(
    std::span<const CoverageBitmap> maps) {
  std::vector<const CoverageBitmap*> ptrs;
  ptrs.reserve(maps.size());
  for (const auto& m : maps) ptrs.push_back(&m);
  return intersect_all(std::span<const CoverageBitmap* const>(ptrs));
}

CoverageBitmap CoverageBitmap::subtract(const CoverageBitmap& other,
                                        SubtractMode mode) const {
  if (other.size() != size()) {
    throw std::invalid_argument("subtract: size mismatch");
  }
  CoverageBitmap out = *this;
  switch (mode) {
    case SubtractMode::kBucketBits:
      for (std::size_t i = 0; i < out.bytes_.size(); ++i) {
        out.bytes_[i] &= static_cast<std::uint8_t>(~other.bytes_[i]);
      }
      break;
    case SubtractMode::kEntries:
      for (std::size_t i = 0; i < out.bytes_.size(); ++i) {
        if (other.bytes_[i] != 0) out.bytes_[i] = 0;
      }
      break;
  }
  return out;
}

std::uint64_t CoverageBitmap::count(CountGranularity granularity) const {
  std::uint64_t n = 0;
  if (granularity == CountGranularity::kEntries) {
    for (std::uint8_t b : bytes_) n += (b != 0);
  } else {
    for (std::uint8_t b : bytes_) n += std::popcount(b);
  }
  return n;
}

double CoverageBitmap::density(CountGranularity granularity) const {
  if (bytes_.empty()) return 0.0;
  return static_cast<double>(count(granularity)) /
         static_cast<double>(bytes_.size());
}

void CoverageBitmap::serialize_to(const std::filesystem::path& path) const {
  write_file_atomic(path,
                    std::string_view(reinterpret_cast<const char*>(
                                         bytes_.data()),
                                     bytes_.size()));
}

CoverageBitmap CoverageBitmap::deserialize_from(
    const std::filesystem::path& path, std::size_t expected_size) {
  std::string blob = read_file(path);
  if (blob.size() != expected_size) {
    throw Error("bitmap " + path.string() + ": expected " +
                std::to_string(expected_size) + " bytes, found " +
                std::to_string(blob.size()));
  }
  std::vector<std::uint8_t> bytes(blob.begin(), blob.end());
  return CoverageBitmap(std::move(bytes));
}

}  // namespace fuzzmux
