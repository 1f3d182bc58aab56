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

#include <gtest/gtest.h>

#include <filesystem>
#include <unistd.h>

#include "fedclust/error.hpp"
#include "fedclust/graphclust.hpp"
#include "oracles.hpp"

namespace fedclust {
namespace {

using testing::clique_graph;
using testing::for_each_partition;
using testing::optimal_cost;
using testing::random_small_graph;

DistanceMatrix matrix(std::size_t n, std::initializer_list<std::tuple<int, int, double>> entries) {
  DistanceMatrix m(n);
  for (auto [i, j, d] : entries) m.set(i, j, d);
  return m;
}

TEST(ThresholdGraph, Examples) {
  const auto m = matrix(3, {{0, 1, 0.5}, {0, 2, 2.0}, {1, 2, 2.0}});
  const auto g = threshold_graph(m, 1.0);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(0, 2));
  EXPECT_EQ(threshold_graph(m, 0.0).num_edges(), 0u);
  EXPECT_EQ(threshold_graph(m, 2.0).num_edges(), 3u);
  EXPECT_FALSE(threshold_graph(m, 2.0).has_edge(1, 1));
  EXPECT_EQ(threshold_graph(m, 1.0).lambda, 1.0);
}

TEST(ThresholdGraph, EdgeIffWithinThreshold) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    DistanceMatrix m(8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) m.set(i, j, u(rng));
    const double lambda = u(rng);
    const auto g = threshold_graph(m, lambda);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (i != j) {
          EXPECT_EQ(g.has_edge(i, j), m(i, j) <= lambda);
        }
  }
}

TEST(Partitions, BellNumbers) {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203};
  for (std::size_t n = 0; n <= 6; ++n) {
    std::size_t count = 0;
    for_each_partition(n, [&](const std::vector<int>&) { ++count; });
    EXPECT_EQ(count, bell[n]);
  }
}

TEST(CorrelationCluster, RecoversDisjointCliques) {
  const auto g = ThresholdGraph::from_edges(5, {{0, 1}, {0, 2}, {1, 2}, {3, 4}});
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    EXPECT_EQ(correlation_cluster(g, seed), Clustering({0, 0, 0, 1, 1}));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto [cg, labels] = clique_graph({4, 1, 3, 2}, seed);
    const auto c = correlation_cluster(cg, seed * 7);
    EXPECT_EQ(c, Clustering(labels));
    EXPECT_EQ(disagreement_cost(cg, c), 0u);
  }
}

TEST(CorrelationCluster, EmptyGraphGivesSingletons) {
  EXPECT_EQ(correlation_cluster(ThresholdGraph::from_edges(6, {}), 3), Clustering::singletons(6));
}

TEST(CorrelationCluster, DeterministicValidPartition) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = random_small_graph(s);
    const auto c = correlation_cluster(g, s);
    EXPECT_EQ(c, correlation_cluster(g, s));
    EXPECT_EQ(c.num_clients(), g.num_vertices);
    EXPECT_TRUE(c.unassigned().empty());
    // Each cluster is its pivot plus neighbours, so some member is adjacent to all others.
    for (const auto& members : c.members()) {
      bool has_center = false;
      for (int p : members) {
        bool all = true;
        for (int q : members) all &= p == q || g.has_edge(p, q);
        has_center |= all;
      }
      EXPECT_TRUE(has_center);
    }
  }
}

TEST(CorrelationCluster, ExpectedCostWithinThreeOfOptimum) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto g = random_small_graph(1000 + s);
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) total += static_cast<double>(disagreement_cost(g, correlation_cluster(g, seed)));
    EXPECT_LE(total / 100.0, 3.0 * static_cast<double>(optimal_cost(g)) + 1e-12) << s;
  }
}

TEST(DisagreementCost, MatchesBruteForceCount) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = random_small_graph(s);
    for_each_partition(g.num_vertices, [&](const std::vector<int>& l) {
      EXPECT_EQ(disagreement_cost(g, Clustering(l)), testing::brute_cost(g, l));
    });
    if (g.num_vertices > 4) break;
  }
}

TEST(FilterMinSize, Examples) {
  const Clustering c({0, 0, 0, 1, 1});
  const auto f = filter_min_size(c, 3);
  EXPECT_EQ(f, Clustering({0, 0, 0, -1, -1}));
  EXPECT_EQ(f.num_clusters(), 1u);
  EXPECT_EQ(filter_min_size(c, 1), c);
  EXPECT_THROW(filter_min_size(Clustering::singletons(4), 2), NoClusterOfMinSize);
  // Ids are recompacted after dissolving the first cluster.
  EXPECT_EQ(filter_min_size(Clustering({0, 1, 1, 2, 2}), 2), Clustering({-1, 0, 0, 1, 1}));
}

TEST(FilterMinSize, NeverGrowsOrAssigns) {
  Rng rng(2);
  std::uniform_int_distribution<int> lab(-1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> labels(12);
    for (auto& l : labels) l = lab(rng);
    const Clustering c(labels);
    for (std::size_t t = 1; t <= 4; ++t) {
      Clustering f;
      try {
        f = filter_min_size(c, t);
      } catch (const NoClusterOfMinSize&) {
        for (auto s : c.sizes()) EXPECT_LT(s, t);
        continue;
      }
      for (std::size_t i = 0; i < 12; ++i) {
        if (!c.assigned(i)) {
          EXPECT_FALSE(f.assigned(i));
        }
        if (f.assigned(i)) {
          EXPECT_EQ(f.sizes()[static_cast<std::size_t>(f.cluster_of(i))], c.sizes()[static_cast<std::size_t>(c.cluster_of(i))]);
          EXPECT_GE(f.sizes()[static_cast<std::size_t>(f.cluster_of(i))], t);
        }
      }
    }
  }
}

TEST(Misclustering, Examples) {
  const Clustering truth({0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  auto m = misclustering(Clustering({1, 1, 1, 1, 1, 0, 0, 0, 0, 0}), truth);
  EXPECT_EQ(m.error_fraction, 0.0);
  EXPECT_TRUE(m.exact_match);
  m = misclustering(Clustering({0, 0, 0, 0, 1, 1, 1, 1, 1, 1}), truth);
  EXPECT_DOUBLE_EQ(m.error_fraction, 0.1);
  EXPECT_FALSE(m.exact_match);
  m = misclustering(Clustering(std::vector<int>(10, -1)), truth);
  EXPECT_EQ(m.error_fraction, 1.0);
  // Split clusters label correctly but are not an exact match.
  m = misclustering(Clustering({0, 0, 1, 1, 1, 2, 2, 2, 2, 2}), truth);
  EXPECT_EQ(m.error_fraction, 0.0);
  EXPECT_FALSE(m.exact_match);
}

TEST(Misclustering, TiesGoToSmallerLabel) {
  const Clustering truth({0, 1, 1, 0});
  const auto m = misclustering(Clustering({0, 0, 1, 1}), truth);
  ASSERT_EQ(m.label_map.size(), 2u);
  EXPECT_EQ(m.label_map[0], 0);
  EXPECT_EQ(m.label_map[1], 0);
  EXPECT_DOUBLE_EQ(m.error_fraction, 0.5);
}

TEST(Misclustering, InvariantToRelabeling) {
  Rng rng(3);
  std::uniform_int_distribution<int> lab(0, 2), est(-1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> t(9), e(9);
    for (auto& v : t) v = lab(rng);
    for (auto& v : e) v = est(rng);
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    auto e2 = e;
    for (auto& v : e2)
      if (v >= 0) v = perm[static_cast<std::size_t>(v)];
    EXPECT_EQ(misclustering(Clustering(e), Clustering(t)).error_fraction,
              misclustering(Clustering(e2), Clustering(t)).error_fraction);
  }
}

TEST(Clustering, CanonicalIdsAndCsv) {
  const Clustering c({5, 5, -1, 2, 9, 2});
  EXPECT_EQ(c.labels(), (std::vector<int>{0, 0, -1, 1, 2, 1}));
  EXPECT_EQ(c.num_clusters(), 3u);
  EXPECT_EQ(c.unassigned(), std::vector<int>{2});
  EXPECT_EQ(c.members_of(1), (std::vector<int>{3, 5}));
  EXPECT_EQ(c.sizes(), (std::vector<std::size_t>{2, 2, 1}));
  const auto path = std::filesystem::temp_directory_path() / ("fedclust_clu_" + std::to_string(::getpid()) + ".csv");
  write_clustering_csv(path, c);
  EXPECT_EQ(read_clustering_csv(path), c);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fedclust
