/*
 * Copyright 2026 The fedclust Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>

namespace fedclust {

using Rng = std::mt19937_64;

/// Purpose tags that separate random streams drawn from the same base seed.
enum class StreamTag : std::uint64_t {
  ClusterModels = 1,
  Features = 2,
  Noise = 3,
  Pivot = 4,
  Participation = 5,
  IfcaInit = 6,
  Resample = 7,
  Minibatch = 8,
  Shards = 9,
  Merge = 10,
  Experiment = 11,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream identified by (base, entity, tag, round). Streams for
/// different clients never depend on enumeration order.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t entity, StreamTag tag,
                                    std::uint64_t round = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ entity);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  return splitmix64(h ^ round);
}

inline Rng make_rng(std::uint64_t base, std::uint64_t entity, StreamTag tag,
                    std::uint64_t round = 0) {
  return Rng(derive_seed(base, entity, tag, round));
}

}  // namespace fedclust
