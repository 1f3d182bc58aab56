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
#include <optional>
#include <vector>

#include "fedclust/aggregation.hpp"
#include "fedclust/clustering.hpp"
#include "fedclust/data.hpp"
#include "fedclust/models.hpp"

namespace fedclust {

/// Per-client test evaluation, averaged without weights over clients.
struct EvalSummary {
  double mean_test_loss = 0.0;
  std::optional<double> mean_test_accuracy;  // classifiers only
  std::vector<double> client_test_loss;
};

/// Evaluates client i on its test split with model_of(i).
EvalSummary evaluate_clients(const FederatedDataset& fd,
                             const std::function<const ParamVector&(std::size_t)>& model_of);

struct LocalResult {
  std::vector<ParamVector> models;
  EvalSummary eval;
};

/// Every client trains alone from the zero vector.
LocalResult train_local(const FederatedDataset& fd, const TrainConfig& cfg);

struct GlobalResult {
  ParamVector model;
  EvalSummary eval;
};

/// FedAvg: cfg.steps rounds; each sampled client runs cfg.local_steps of GD
/// from the global model and the server takes the unweighted mean.
GlobalResult fedavg_global(const FederatedDataset& fd, const TrainConfig& cfg,
                           const Participation& participation = {},
                           std::optional<ParamVector> w0 = std::nullopt,
                           std::vector<ParamVector>* trace = nullptr);

struct IfcaConfig {
  std::size_t clusters = 2;  // K
  std::size_t rounds = 0;    // 0 = train.steps
  TrainConfig train;
  std::uint64_t seed = 0;
  double participation_fraction = 1.0;
  double init_low = -1.0;
  double init_high = 1.0;
  /// Overrides the random initialisation when set (must hold K models).
  std::optional<std::vector<ParamVector>> initial_models;

  void validate() const;
  std::size_t effective_rounds() const { return rounds == 0 ? train.steps : rounds; }
};

/// K models with coordinates iid uniform in [init_low, init_high].
std::vector<ParamVector> ifca_initial_models(const IfcaConfig& cfg, std::size_t dim);

/// Participation used by IFCA and, for equivalence, by fedavg_global callers.
Participation ifca_participation(const IfcaConfig& cfg);

struct IfcaResult {
  Clustering clustering;
  std::vector<ParamVector> models;
  EvalSummary eval;
  /// Cluster of every client per round (-1 for clients not sampled).
  std::vector<std::vector<int>> assignments;
};

/// Each round, every sampled client picks the model with the lowest train
/// loss (ties to the smaller index), runs local steps from it, and the
/// server averages the returned models per cluster. Clusters nobody picked
/// keep their previous model.
IfcaResult ifca(const FederatedDataset& fd, const IfcaConfig& cfg,
                std::vector<std::vector<ParamVector>>* trace = nullptr);

}  // namespace fedclust
