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
#include <optional>
#include <vector>

#include "fedclust/aggregation.hpp"
#include "fedclust/clustering.hpp"
#include "fedclust/data.hpp"
#include "fedclust/distance.hpp"
#include "fedclust/graphclust.hpp"
#include "fedclust/models.hpp"

namespace fedclust {

struct SrfcaConfig {
  /// Edge threshold; nullopt picks the midpoint of the largest gap in the
  /// sorted pairwise distances.
  std::optional<double> lambda;
  std::size_t min_cluster_size = 2;  // t
  std::size_t refine_rounds = 1;     // R
  DistanceKind metric = DistanceKind::L2Params;
  Split distance_split = Split::Train;  // cross-loss evaluation split
  TrainConfig train;
  bool resample_per_refine = false;
  double participation_fraction = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Clustering plus the models it carries. cluster_models[c] belongs to
/// cluster id c; node_models holds one model per client.
struct ClusterState {
  Clustering clustering;
  std::vector<ParamVector> cluster_models;
  std::vector<ParamVector> node_models;
  double lambda = 0.0;
};

/// Midpoint of the largest gap between consecutive sorted distances.
double default_lambda(const DistanceMatrix& m);

DistanceMatrix node_distances(const FederatedDataset& fd, const std::vector<ParamVector>& node_models,
                              const SrfcaConfig& cfg);

/// Local training of every client from the zero vector.
std::vector<ParamVector> train_node_models(const FederatedDataset& fd, const TrainConfig& cfg);

/// Local training, threshold graph, correlation clustering, size filter.
/// Cluster models start as the mean of their members' node models.
ClusterState one_shot(const FederatedDataset& fd, const SrfcaConfig& cfg);

/// one_shot with precomputed node models (skips local training).
ClusterState one_shot_from_models(const FederatedDataset& fd, std::vector<ParamVector> node_models,
                                  const SrfcaConfig& cfg);

/// TrimmedMeanGD from the zero vector inside every cluster of `clustering`.
/// `round` only selects the participation stream.
std::vector<ParamVector> fit_cluster_models(const FederatedDataset& fd, const Clustering& clustering,
                                            const SrfcaConfig& cfg, std::uint64_t round = 0);

/// Sends every client, unassigned ones included, to the cluster whose model
/// is nearest to its node model (ties to the smaller id), then filters by t.
Clustering recluster(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg);

/// recluster, keeping each surviving cluster's model.
ClusterState recluster_state(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg);

/// Threshold graph over cluster models, correlation clustering, union of the
/// member clusters with the unweighted mean of their models, filter by t.
ClusterState merge(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg,
                   std::uint64_t round = 0);

/// TrimmedMeanGD per cluster, then recluster, then merge. With
/// resample_per_refine the clients are redrawn and node models retrained first.
ClusterState refine(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg,
                    std::uint64_t round);

struct SrfcaResult {
  ClusterState state;
  std::vector<Clustering> trace;  // after one_shot and after every refine
};

SrfcaResult sr_fca(const FederatedDataset& fd, const SrfcaConfig& cfg);

/// Model used to evaluate a client: its cluster's model, or for an
/// unassigned client the nearest cluster model under cfg.metric.
const ParamVector& model_for_client(const ClusterState& state, const FederatedDataset& fd,
                                    const SrfcaConfig& cfg, std::size_t client);

}  // namespace fedclust
