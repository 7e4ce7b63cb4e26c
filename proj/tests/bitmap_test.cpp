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

#include <gtest/gtest.h>

#include <bit>

#include "fuzzmux/util.hpp"
#include "testutil.hpp"

namespace fuzzmux {
namespace {

// Independent range-based bucket oracle, written from the hit-count ranges
// rather than the production lookup table.
std::uint8_t bucket_oracle(int hits) {
  if (hits == 0) return 0x00;
  if (hits == 1) return 0x01;
  if (hits == 2) return 0x02;
  if (hits == 3) return 0x04;
  if (hits <= 7) return 0x08;
  if (hits <= 15) return 0x10;
  if (hits <= 31) return 0x20;
  if (hits <= 127) return 0x40;
  return 0x80;
}

CoverageBitmap random_map(DetRng& rng, std::size_t size, double fill) {
  std::vector<std::uint8_t> bytes(size, 0);
  for (auto& b : bytes) {
    if (rng.next_unit() < fill) {
      b = bucket_oracle(static_cast<int>(1 + rng.next_below(255)));
    }
  }
  return CoverageBitmap(std::move(bytes));
}

TEST(BucketizeTest, ExhaustiveAgainstRangeOracle) {
  RawHitMap raw(256);
  for (int i = 0; i < 256; ++i) raw[i] = static_cast<std::uint8_t>(i);
  const CoverageBitmap map = CoverageBitmap::bucketize(raw);
  for (int i = 0; i < 256; ++i) {
    EXPECT_EQ(map[static_cast<std::size_t>(i)], bucket_oracle(i))
        << "raw count " << i;
  }
}

TEST(BucketizeTest, EveryBucketIsOneBitOrZero) {
  for (int i = 0; i < 256; ++i) {
    const std::uint8_t b = kBucketLookup[static_cast<std::size_t>(i)];
    EXPECT_TRUE(b == 0 || std::popcount(b) == 1);
  }
}

TEST(BitmapAlgebraTest, NaiveOraclesOnRandomPairs) {
  DetRng rng(2026);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t size = 64;
    CoverageBitmap a = random_map(rng, size, 0.4);
    const CoverageBitmap b = random_map(rng, size, 0.4);

    // Naive per-byte recomputation of every operation.
    std::uint64_t union_entries = 0, union_bits = 0;
    std::uint64_t inter_entries = 0;
    std::uint64_t sub_bits_count = 0, sub_entries_count = 0;
    for (std::size_t i = 0; i < size; ++i) {
      const std::uint8_t u = a[i] | b[i];
      if (u != 0) ++union_entries;
      union_bits += static_cast<std::uint64_t>(std::popcount(u));
      if ((a[i] & b[i]) != 0) ++inter_entries;
      if ((a[i] & static_cast<std::uint8_t>(~b[i])) != 0) ++sub_bits_count;
      if (b[i] == 0 && a[i] != 0) ++sub_entries_count;
    }

    const CoverageBitmap inter =
        CoverageBitmap::intersect_all(std::vector<CoverageBitmap>{a, b});
    EXPECT_EQ(inter.count(CountGranularity::kEntries), inter_entries);

    EXPECT_EQ(a.subtract(b, SubtractMode::kBucketBits)
                  .count(CountGranularity::kEntries),
              sub_bits_count);
    EXPECT_EQ(a.subtract(b, SubtractMode::kEntries)
                  .count(CountGranularity::kEntries),
              sub_entries_count);

    CoverageBitmap unioned = a;
    unioned.union_into(b);
    EXPECT_EQ(unioned.count(CountGranularity::kEntries), union_entries);
    EXPECT_EQ(unioned.count(CountGranularity::kBits), union_bits);
    EXPECT_DOUBLE_EQ(unioned.density(CountGranularity::kEntries),
                     static_cast<double>(union_entries) /
                         static_cast<double>(size));
  }
}

TEST(BitmapAlgebraTest, AlgebraicIdentities) {
  DetRng rng(7);
  const CoverageBitmap a = random_map(rng, 128, 0.5);
  const CoverageBitmap b = random_map(rng, 128, 0.5);

  // a - a = 0; a | a = a; a & a = a.
  EXPECT_EQ(a.subtract(a).count(), 0u);
  CoverageBitmap aa = a;
  aa.union_into(a);
  EXPECT_EQ(aa, a);
  EXPECT_EQ(CoverageBitmap::intersect_all(std::vector<CoverageBitmap>{a, a}),
            a);

  // Subtracting the intersection never removes everything both maps share:
  // (a - (a&b)) has no byte overlapping (a&b) under bucket-bit subtraction.
  const CoverageBitmap common =
      CoverageBitmap::intersect_all(std::vector<CoverageBitmap>{a, b});
  const CoverageBitmap uniq = a.subtract(common, SubtractMode::kBucketBits);
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    EXPECT_EQ(uniq[i] & common[i], 0);
  }
}

TEST(BitmapAlgebraTest, SizeMismatchThrows) {
  CoverageBitmap a(64);
  const CoverageBitmap b(128);
  EXPECT_THROW(a.union_into(b), std::invalid_argument);
  EXPECT_THROW(a.subtract(b), std::invalid_argument);
  EXPECT_THROW(
      CoverageBitmap::intersect_all(std::vector<CoverageBitmap>{a, b}),
      std::invalid_argument);
}

TEST(BitmapAlgebraTest, IntersectAllOfNothingThrows) {
  EXPECT_THROW(CoverageBitmap::intersect_all(std::vector<CoverageBitmap>{}),
               std::invalid_argument);
}

TEST(BitmapCountTest, EntriesVsBits) {
  std::vector<std::uint8_t> bytes(8, 0);
  bytes[0] = 0x01;
  bytes[3] = 0x03;  // two bucket bits, one entry
  bytes[7] = 0x80;
  const CoverageBitmap map{std::move(bytes)};
  EXPECT_EQ(map.count(CountGranularity::kEntries), 3u);
  EXPECT_EQ(map.count(CountGranularity::kBits), 4u);
  EXPECT_DOUBLE_EQ(map.density(CountGranularity::kEntries), 3.0 / 8.0);
}

TEST(BitmapCountTest, EmptyMapDensityIsZero) {
  const CoverageBitmap map;
  EXPECT_EQ(map.count(), 0u);
  EXPECT_DOUBLE_EQ(map.density(), 0.0);
}

TEST(BitmapSerializationTest, RoundTripAndSizeCheck) {
  test::TempDir tmp;
  DetRng rng(99);
  const CoverageBitmap map = random_map(rng, 4096, 0.2);
  map.serialize_to(tmp / "m.bitmap");
  EXPECT_EQ(std::filesystem::file_size(tmp / "m.bitmap"), 4096u);

  const CoverageBitmap back =
      CoverageBitmap::deserialize_from(tmp / "m.bitmap", 4096);
  EXPECT_EQ(back, map);

  EXPECT_THROW(CoverageBitmap::deserialize_from(tmp / "m.bitmap", 1024),
               Error);
  EXPECT_THROW(CoverageBitmap::deserialize_from(tmp / "missing.bitmap", 4096),
               Error);
}

}  // namespace
}  // namespace fuzzmux
