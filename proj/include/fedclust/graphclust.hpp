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
#include <vector>

#include "fedclust/clustering.hpp"
#include "fedclust/distance.hpp"

namespace fedclust {

/// Undirected graph with an edge (i, j), i != j, iff M(i, j) <= lambda.
struct ThresholdGraph {
  std::size_t num_vertices = 0;
  double lambda = 0.0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbour lists

  std::size_t num_edges() const;
  bool has_edge(int i, int j) const;

  /// Graph from an explicit edge list (tests and oracles).
  static ThresholdGraph from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges);
};

ThresholdGraph threshold_graph(const DistanceMatrix& m, double lambda);

/// Randomized pivot correlation clustering: visit vertices in a seeded
/// shuffle of 0..n-1; each still-unclustered vertex becomes a pivot and takes
/// its unclustered neighbours with it.
Clustering correlation_cluster(const ThresholdGraph& g, std::uint64_t seed);

/// Edges cut between clusters plus non-edges inside clusters.
std::size_t disagreement_cost(const ThresholdGraph& g, const Clustering& c);

/// Dissolves clusters with fewer than t members into the unassigned set and
/// compacts the ids. Throws NoClusterOfMinSize when nothing survives.
Clustering filter_min_size(const Clustering& c, std::size_t t);

struct Misclustering {
  double error_fraction = 0.0;
  bool exact_match = false;
  /// Majority ground-truth label of every estimated cluster.
  std::vector<int> label_map;
};

/// Labels every estimated cluster with the majority true cluster of its
/// members (ties go to the smaller label) and counts clients whose label
/// differs from their truth, plus all unassigned clients, over m.
Misclustering misclustering(const Clustering& estimate, const Clustering& truth);

}  // namespace fedclust
