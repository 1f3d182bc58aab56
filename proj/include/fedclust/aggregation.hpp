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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fedclust/dataset.hpp"
#include "fedclust/models.hpp"

namespace fedclust {

/// Number of values dropped from each side of a coordinate: floor(beta * J).
std::size_t trim_count(std::size_t count, double beta);

/// Coordinate-wise trimmed mean. For each coordinate the floor(beta*J)
/// smallest and largest values are dropped and the rest averaged (divided by
/// the retained count). Throws OverTrim if nothing would remain.
ParamVector trmean(std::span<const ParamVector> vectors, double beta);

/// Coordinate-wise arithmetic mean.
ParamVector mean(std::span<const ParamVector> vectors);

/// A participant in a federated round. Honest clients answer from their
/// training data; tests substitute arbitrary (e.g. Byzantine) behaviour.
struct Member {
  int id = 0;
  /// Gradient of the member's empirical risk at the shared iterate.
  std::function<ParamVector(const ParamVector&)> gradient;
  /// Model after cfg.local_steps GD steps starting from the shared iterate.
  std::function<ParamVector(const ParamVector&, const TrainConfig&)> local_update;
};

Member honest_member(const ModelKind& kind, const ClientDataset& data);

/// Client sampling per round: ceil(fraction * J) members (at least one),
/// drawn from the stream (seed, stream_id, round).
struct Participation {
  double fraction = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Indices into a member list of size `count` taking part in `round`, sorted.
std::vector<std::size_t> select_participants(std::size_t count, const Participation& p,
                                             std::uint64_t round);

/// Robust per-cluster training. T rounds from w0; with local_steps == 1 the
/// server steps w <- proj(w - eta * TrMean(gradients)), otherwise every member
/// runs local_steps of GD and the server takes w <- TrMean(local models).
/// `trace`, when given, receives w_0..w_T.
ParamVector trimmed_mean_gd(std::span<const Member> members, const ParamVector& w0,
                            const TrainConfig& cfg, const Participation& participation = {},
                            std::vector<ParamVector>* trace = nullptr);

ParamVector trimmed_mean_gd(const ModelKind& kind, std::span<const ClientDataset* const> members,
                            const ParamVector& w0, const TrainConfig& cfg,
                            const Participation& participation = {},
                            std::vector<ParamVector>* trace = nullptr);

}  // namespace fedclust
