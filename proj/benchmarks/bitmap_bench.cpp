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

// Hot-path microbenchmarks: the bitmap algebra runs after every corpus file
// and the allocator once per round, on 64 KiB maps by default.

#include <benchmark/benchmark.h>

#include <vector>

#include "fuzzmux/allocator.hpp"
#include "fuzzmux/bitmap.hpp"
#include "fuzzmux/util.hpp"

namespace {

constexpr std::size_t kMapSize = 65536;

fuzzmux::RawHitMap random_raw(std::uint64_t seed, double fill) {
  fuzzmux::DetRng rng(seed);
  fuzzmux::RawHitMap raw(kMapSize, 0);
  for (auto& b : raw) {
    if (rng.next_unit() < fill) {
      b = static_cast<std::uint8_t>(1 + rng.next_below(255));
    }
  }
  return raw;
}

fuzzmux::CoverageBitmap random_map(std::uint64_t seed, double fill) {
  return fuzzmux::CoverageBitmap::bucketize(random_raw(seed, fill));
}

void BM_Bucketize(benchmark::State& state) {
  const fuzzmux::RawHitMap raw = random_raw(1, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzzmux::CoverageBitmap::bucketize(raw));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(kMapSize));
}
BENCHMARK(BM_Bucketize);

void BM_UnionInto(benchmark::State& state) {
  fuzzmux::CoverageBitmap acc = random_map(2, 0.1);
  const fuzzmux::CoverageBitmap other = random_map(3, 0.1);
  for (auto _ : state) {
    acc.union_into(other);
    benchmark::DoNotOptimize(acc);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(kMapSize));
}
BENCHMARK(BM_UnionInto);

void BM_CountEntries(benchmark::State& state) {
  const fuzzmux::CoverageBitmap map = random_map(4, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.count(fuzzmux::CountGranularity::kEntries));
  }
}
BENCHMARK(BM_CountEntries);

void BM_CountBits(benchmark::State& state) {
  const fuzzmux::CoverageBitmap map = random_map(5, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.count(fuzzmux::CountGranularity::kBits));
  }
}
BENCHMARK(BM_CountBits);

void BM_IntersectAll(benchmark::State& state) {
  std::vector<fuzzmux::CoverageBitmap> maps;
  for (int i = 0; i < 4; ++i) {
    maps.push_back(random_map(10 + static_cast<std::uint64_t>(i), 0.3));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzzmux::CoverageBitmap::intersect_all(
        std::span<const fuzzmux::CoverageBitmap>(maps)));
  }
}
BENCHMARK(BM_IntersectAll);

void BM_ResourceAllocator(benchmark::State& state) {
  std::vector<fuzzmux::CoverageBitmap> maps;
  for (int i = 0; i < 4; ++i) {
    maps.push_back(random_map(20 + static_cast<std::uint64_t>(i), 0.3));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzzmux::resource_allocator(
        maps, false, fuzzmux::SubtractMode::kBucketBits,
        fuzzmux::CountGranularity::kEntries));
  }
}
BENCHMARK(BM_ResourceAllocator);

}  // namespace

BENCHMARK_MAIN();
