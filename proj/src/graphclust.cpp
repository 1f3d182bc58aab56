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

#include "fedclust/graphclust.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "csv_util.hpp"
#include "fedclust/error.hpp"
#include "fedclust/rng.hpp"

namespace fedclust {

// ---------------------------------------------------------------------------
// Clustering

Clustering::Clustering(const std::vector<int>& labels) : labels_(labels.size(), kUnassigned) {
  std::vector<std::pair<int, int>> remap;  // original id -> canonical id
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) continue;
    auto it = std::find_if(remap.begin(), remap.end(), [&](const auto& p) { return p.first == labels[i]; });
    if (it == remap.end()) {
      remap.emplace_back(labels[i], static_cast<int>(remap.size()));
      it = remap.end() - 1;
    }
    labels_[i] = it->second;
  }
  num_clusters_ = remap.size();
}

Clustering Clustering::single(std::size_t m) { return Clustering(std::vector<int>(m, 0)); }

Clustering Clustering::singletons(std::size_t m) {
  std::vector<int> l(m);
  std::iota(l.begin(), l.end(), 0);
  return Clustering(l);
}

std::vector<std::vector<int>> Clustering::members() const {
  std::vector<std::vector<int>> out(num_clusters_);
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] >= 0) out[static_cast<std::size_t>(labels_[i])].push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Clustering::members_of(int cluster) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == cluster) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Clustering::unassigned() const { return members_of(kUnassigned); }

std::vector<std::size_t> Clustering::sizes() const {
  std::vector<std::size_t> s(num_clusters_, 0);
  for (int l : labels_)
    if (l >= 0) ++s[static_cast<std::size_t>(l)];
  return s;
}

void write_clustering_csv(const std::filesystem::path& path, const Clustering& c) {
  auto out = csv::open_out(path);
  out << "client_id,cluster_id\n";
  for (std::size_t i = 0; i < c.num_clients(); ++i) out << i << ',' << c.cluster_of(i) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Clustering read_clustering_csv(const std::filesystem::path& path) {
  auto in = csv::open_in(path);
  std::string line;
  std::vector<double> vals;
  std::vector<std::pair<long long, int>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.rfind("client_id", 0) == 0) continue;
    if (!csv::parse_doubles(line, vals) || vals.size() != 2)
      throw FormatError(path.string(), lineno, "expected 'client_id,cluster_id'");
    rows.emplace_back(static_cast<long long>(vals[0]), static_cast<int>(vals[1]));
  }
  std::vector<int> labels(rows.size(), Clustering::kUnassigned);
  std::vector<bool> seen(rows.size(), false);
  for (const auto& [id, cl] : rows) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows.size() || seen[static_cast<std::size_t>(id)])
      throw FormatError(path.string(), "client ids must be a permutation of 0..m-1");
    seen[static_cast<std::size_t>(id)] = true;
    labels[static_cast<std::size_t>(id)] = cl;
  }
  return Clustering(labels);
}

// ---------------------------------------------------------------------------
// Graphs

std::size_t ThresholdGraph::num_edges() const {
  std::size_t s = 0;
  for (const auto& a : adjacency) s += a.size();
  return s / 2;
}

bool ThresholdGraph::has_edge(int i, int j) const {
  const auto& a = adjacency[static_cast<std::size_t>(i)];
  return std::binary_search(a.begin(), a.end(), j);
}

ThresholdGraph ThresholdGraph::from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  ThresholdGraph g;
  g.num_vertices = n;
  g.adjacency.assign(n, {});
  for (auto [i, j] : edges) {
    if (i == j) continue;
    g.adjacency[static_cast<std::size_t>(i)].push_back(j);
    g.adjacency[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& a : g.adjacency) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

ThresholdGraph threshold_graph(const DistanceMatrix& m, double lambda) {
  ThresholdGraph g;
  g.num_vertices = m.size();
  g.lambda = lambda;
  g.adjacency.assign(m.size(), {});
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (i != j && m(i, j) <= lambda) g.adjacency[i].push_back(static_cast<int>(j));
  return g;
}

Clustering correlation_cluster(const ThresholdGraph& g, std::uint64_t seed) {
  const std::size_t n = g.num_vertices;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, 0, StreamTag::Pivot);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> labels(n, Clustering::kUnassigned);
  int next = 0;
  for (int pivot : order) {
    if (labels[static_cast<std::size_t>(pivot)] >= 0) continue;
    labels[static_cast<std::size_t>(pivot)] = next;
    for (int v : g.adjacency[static_cast<std::size_t>(pivot)])
      if (labels[static_cast<std::size_t>(v)] < 0) labels[static_cast<std::size_t>(v)] = next;
    ++next;
  }
  return Clustering(labels);
}

std::size_t disagreement_cost(const ThresholdGraph& g, const Clustering& c) {
  std::size_t cost = 0;
  for (std::size_t i = 0; i < g.num_vertices; ++i)
    for (std::size_t j = i + 1; j < g.num_vertices; ++j) {
      const bool together = c.assigned(i) && c.cluster_of(i) == c.cluster_of(j);
      if (g.has_edge(static_cast<int>(i), static_cast<int>(j)) != together) ++cost;
    }
  return cost;
}

Clustering filter_min_size(const Clustering& c, std::size_t t) {
  if (t < 1) throw InvalidConfig("minimum cluster size must be >= 1");
  const auto sizes = c.sizes();
  std::vector<int> labels = c.labels();
  bool any = false;
  for (int& l : labels) {
    if (l < 0) continue;
    if (sizes[static_cast<std::size_t>(l)] < t)
      l = Clustering::kUnassigned;
    else
      any = true;
  }
  if (!any) throw NoClusterOfMinSize(t);
  return Clustering(labels);
}

Misclustering misclustering(const Clustering& estimate, const Clustering& truth) {
  const std::size_t m = truth.num_clients();
  if (estimate.num_clients() != m)
    throw DimensionMismatch("misclustering client count", m, estimate.num_clients());
  Misclustering r;
  r.label_map.assign(estimate.num_clusters(), 0);
  const std::size_t T = truth.num_clusters();
  std::vector<std::vector<std::size_t>> counts(estimate.num_clusters(), std::vector<std::size_t>(T, 0));
  for (std::size_t i = 0; i < m; ++i) {
    if (!truth.assigned(i)) throw InvalidConfig("ground truth must assign every client");
    if (estimate.assigned(i))
      ++counts[static_cast<std::size_t>(estimate.cluster_of(i))][static_cast<std::size_t>(truth.cluster_of(i))];
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    r.label_map[c] = static_cast<int>(std::max_element(counts[c].begin(), counts[c].end()) - counts[c].begin());

  std::size_t wrong = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!estimate.assigned(i) || r.label_map[static_cast<std::size_t>(estimate.cluster_of(i))] != truth.cluster_of(i))
      ++wrong;
  }
  r.error_fraction = m == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(m);
  r.exact_match = wrong == 0 && estimate.num_clusters() == truth.num_clusters();
  return r;
}

}  // namespace fedclust
