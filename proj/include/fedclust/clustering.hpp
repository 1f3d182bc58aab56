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
#include <filesystem>
#include <vector>

namespace fedclust {

/// Total map from client id to cluster id, with -1 marking unassigned
/// clients. Cluster ids are kept canonical: contiguous from 0 and numbered
/// in order of each cluster's smallest member, so two clusterings that group
/// clients identically compare equal regardless of the ids they were built
/// with.
class Clustering {
 public:
  static constexpr int kUnassigned = -1;

  Clustering() = default;
  /// Any negative label means unassigned.
  explicit Clustering(const std::vector<int>& labels);

  /// All clients in one cluster / each client in its own cluster.
  static Clustering single(std::size_t m);
  static Clustering singletons(std::size_t m);

  std::size_t num_clients() const { return labels_.size(); }
  std::size_t num_clusters() const { return num_clusters_; }
  int cluster_of(std::size_t client) const { return labels_[client]; }
  bool assigned(std::size_t client) const { return labels_[client] != kUnassigned; }
  const std::vector<int>& labels() const { return labels_; }

  std::vector<std::vector<int>> members() const;
  std::vector<int> members_of(int cluster) const;
  std::vector<int> unassigned() const;
  std::vector<std::size_t> sizes() const;

  bool operator==(const Clustering&) const = default;

 private:
  std::vector<int> labels_;
  std::size_t num_clusters_ = 0;
};

/// CSV with header `client_id,cluster_id`; unassigned clients are written
/// with cluster id -1.
void write_clustering_csv(const std::filesystem::path& path, const Clustering& c);
Clustering read_clustering_csv(const std::filesystem::path& path);

}  // namespace fedclust
