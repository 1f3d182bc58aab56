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

#include "fedclust/srfca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedclust/error.hpp"
#include "fedclust/rng.hpp"

namespace fedclust {

void SrfcaConfig::validate() const {
  if (lambda && !(*lambda >= 0.0)) throw InvalidConfig("lambda must be >= 0");
  if (min_cluster_size < 1) throw InvalidConfig("minimum cluster size t must be >= 1");
  if (!(participation_fraction > 0.0 && participation_fraction <= 1.0))
    throw InvalidConfig("participation fraction must be in (0, 1]");
  train.validate();
}

double default_lambda(const DistanceMatrix& m) {
  auto d = m.upper_triangle();
  if (d.empty()) return 0.0;
  std::sort(d.begin(), d.end());
  if (d.size() == 1) return d.front();
  double best_gap = -1.0, lambda = d.back();
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    const double gap = d[i + 1] - d[i];
    if (gap > best_gap) {
      best_gap = gap;
      lambda = 0.5 * (d[i] + d[i + 1]);
    }
  }
  return best_gap > 0.0 ? lambda : d.back();
}

namespace {

std::vector<Entity> node_entities(const FederatedDataset& fd, const std::vector<ParamVector>& models) {
  std::vector<Entity> out(fd.num_clients());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Entity{&models[i], {&fd.clients[i]}};
  return out;
}

std::vector<Entity> cluster_entities(const FederatedDataset& fd, const Clustering& c,
                                     const std::vector<ParamVector>& models) {
  std::vector<Entity> out(c.num_clusters());
  for (std::size_t k = 0; k < out.size(); ++k) out[k].model = &models[k];
  for (std::size_t i = 0; i < c.num_clients(); ++i)
    if (c.assigned(i)) out[static_cast<std::size_t>(c.cluster_of(i))].data.push_back(&fd.clients[i]);
  return out;
}

DistanceMetric metric_of(const FederatedDataset& fd, const SrfcaConfig& cfg) {
  return DistanceMetric{cfg.metric, fd.kind, cfg.distance_split};
}

// Re-keys models after a relabel: raw[i] is client i's cluster id before
// Clustering canonicalized it, which indexes `models`.
std::vector<ParamVector> carry_models(const Clustering& canonical, const std::vector<int>& raw,
                                      const std::vector<ParamVector>& models) {
  std::vector<ParamVector> out(canonical.num_clusters());
  std::vector<bool> done(out.size(), false);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!canonical.assigned(i)) continue;
    const auto k = static_cast<std::size_t>(canonical.cluster_of(i));
    if (!done[k]) {
      out[k] = models[static_cast<std::size_t>(raw[i])];
      done[k] = true;
    }
  }
  return out;
}

std::vector<ParamVector> member_means(const Clustering& c, const std::vector<ParamVector>& node_models) {
  std::vector<ParamVector> out;
  for (const auto& members : c.members()) {
    std::vector<ParamVector> ms;
    for (int i : members) ms.push_back(node_models[static_cast<std::size_t>(i)]);
    out.push_back(mean(ms));
  }
  return out;
}

}  // namespace

std::vector<ParamVector> train_node_models(const FederatedDataset& fd, const TrainConfig& cfg) {
  std::vector<ParamVector> out;
  out.reserve(fd.num_clients());
  const ParamVector w0(fd.kind.param_dim());
  for (const auto& c : fd.clients) out.push_back(local_train(fd.kind, w0, c, cfg));
  return out;
}

DistanceMatrix node_distances(const FederatedDataset& fd, const std::vector<ParamVector>& node_models,
                              const SrfcaConfig& cfg) {
  const auto ents = node_entities(fd, node_models);
  return pairwise_matrix(ents, metric_of(fd, cfg));
}

ClusterState one_shot_from_models(const FederatedDataset& fd, std::vector<ParamVector> node_models,
                                  const SrfcaConfig& cfg) {
  cfg.validate();
  if (node_models.size() != fd.num_clients())
    throw DimensionMismatch("node models", fd.num_clients(), node_models.size());
  const DistanceMatrix dist = node_distances(fd, node_models, cfg);
  ClusterState s;
  s.lambda = cfg.lambda ? *cfg.lambda : default_lambda(dist);
  const ThresholdGraph g = threshold_graph(dist, s.lambda);
  s.clustering = filter_min_size(correlation_cluster(g, derive_seed(cfg.seed, 0, StreamTag::Pivot)),
                                 cfg.min_cluster_size);
  s.cluster_models = member_means(s.clustering, node_models);
  s.node_models = std::move(node_models);
  return s;
}

ClusterState one_shot(const FederatedDataset& fd, const SrfcaConfig& cfg) {
  cfg.validate();
  return one_shot_from_models(fd, train_node_models(fd, cfg.train), cfg);
}

std::vector<ParamVector> fit_cluster_models(const FederatedDataset& fd, const Clustering& clustering,
                                            const SrfcaConfig& cfg, std::uint64_t round) {
  std::vector<ParamVector> out;
  const ParamVector w0(fd.kind.param_dim());
  const auto members = clustering.members();
  for (std::size_t k = 0; k < members.size(); ++k) {
    std::vector<const ClientDataset*> data;
    for (int i : members[k]) data.push_back(&fd.clients[static_cast<std::size_t>(i)]);
    const Participation p{cfg.participation_fraction, derive_seed(cfg.seed, round, StreamTag::Participation), k};
    out.push_back(trimmed_mean_gd(fd.kind, data, w0, cfg.train, p));
  }
  return out;
}

ClusterState recluster_state(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg) {
  if (state.cluster_models.empty()) throw EmptyData("recluster needs at least one cluster model");
  const DistanceMetric metric = metric_of(fd, cfg);
  const auto nodes = node_entities(fd, state.node_models);
  const auto clusters = cluster_entities(fd, state.clustering, state.cluster_models);
  std::vector<int> raw(fd.num_clients());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
      const double d = metric(nodes[i], clusters[k]);
      if (d < best) {
        best = d;
        arg = static_cast<int>(k);
      }
    }
    raw[i] = arg;
  }
  ClusterState out;
  out.clustering = filter_min_size(Clustering(raw), cfg.min_cluster_size);
  out.cluster_models = carry_models(out.clustering, raw, state.cluster_models);
  out.node_models = state.node_models;
  out.lambda = state.lambda;
  return out;
}

Clustering recluster(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg) {
  return recluster_state(state, fd, cfg).clustering;
}

ClusterState merge(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg,
                   std::uint64_t round) {
  const std::size_t K = state.clustering.num_clusters();
  if (K == 0) throw EmptyData("merge needs at least one cluster");
  const auto ents = cluster_entities(fd, state.clustering, state.cluster_models);
  const DistanceMatrix dist = pairwise_matrix(ents, metric_of(fd, cfg));
  const double lambda = cfg.lambda ? *cfg.lambda : state.lambda;
  const Clustering groups = correlation_cluster(threshold_graph(dist, lambda),
                                                derive_seed(cfg.seed, round, StreamTag::Merge));

  std::vector<ParamVector> group_models;
  for (const auto& comps : groups.members()) {
    std::vector<ParamVector> ms;
    for (int c : comps) ms.push_back(state.cluster_models[static_cast<std::size_t>(c)]);
    group_models.push_back(mean(ms));
  }
  std::vector<int> raw(state.clustering.num_clients(), Clustering::kUnassigned);
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (state.clustering.assigned(i))
      raw[i] = groups.cluster_of(static_cast<std::size_t>(state.clustering.cluster_of(i)));

  ClusterState out;
  out.clustering = filter_min_size(Clustering(raw), cfg.min_cluster_size);
  out.cluster_models = carry_models(out.clustering, raw, group_models);
  out.node_models = state.node_models;
  out.lambda = lambda;
  return out;
}

ClusterState refine(const ClusterState& state, const FederatedDataset& fd, const SrfcaConfig& cfg,
                    std::uint64_t round) {
  cfg.validate();
  ClusterState s = state;
  const FederatedDataset* data = &fd;
  FederatedDataset fresh;
  if (cfg.resample_per_refine) {
    fresh = resample_clients(fd, round);
    data = &fresh;
    s.node_models = train_node_models(fresh, cfg.train);
  }
  s.cluster_models = fit_cluster_models(*data, s.clustering, cfg, round);
  s = recluster_state(s, *data, cfg);
  return merge(s, *data, cfg, round);
}

SrfcaResult sr_fca(const FederatedDataset& fd, const SrfcaConfig& cfg) {
  SrfcaResult r;
  r.state = one_shot(fd, cfg);
  r.trace.push_back(r.state.clustering);
  for (std::size_t round = 1; round <= cfg.refine_rounds; ++round) {
    r.state = refine(r.state, fd, cfg, round);
    r.trace.push_back(r.state.clustering);
  }
  return r;
}

const ParamVector& model_for_client(const ClusterState& state, const FederatedDataset& fd,
                                    const SrfcaConfig& cfg, std::size_t client) {
  if (state.clustering.assigned(client))
    return state.cluster_models[static_cast<std::size_t>(state.clustering.cluster_of(client))];
  const DistanceMetric metric = metric_of(fd, cfg);
  const auto clusters = cluster_entities(fd, state.clustering, state.cluster_models);
  const Entity node{&state.node_models[client], {&fd.clients[client]}};
  std::size_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const double d = metric(node, clusters[k]);
    if (d < best) {
      best = d;
      arg = k;
    }
  }
  return state.cluster_models.at(arg);
}

}  // namespace fedclust
