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

#include "fedclust/distance.hpp"

#include <cmath>

#include "fedclust/error.hpp"
#include "fedclust/kernels.hpp"

namespace fedclust {

std::string to_string(DistanceKind k) { return k == DistanceKind::L2Params ? "l2" : "cross-loss"; }

DistanceKind parse_distance_kind(const std::string& s) {
  if (s == "l2") return DistanceKind::L2Params;
  if (s == "cross-loss" || s == "cross_loss") return DistanceKind::CrossClusterLoss;
  throw InvalidConfig("unknown distance metric '" + s + "'");
}

double dist_l2(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dist_l2", a.size(), b.size());
  return std::sqrt(simd::sq_dist(a.values(), b.values()));
}

double pooled_loss(const ModelKind& kind, const ParamVector& w,
                   std::span<const ClientDataset* const> data, Split split) {
  double total = 0.0;
  std::size_t rows = 0;
  for (const ClientDataset* c : data) {
    const DataView v = c->view(split);
    if (v.empty()) continue;
    total += loss(kind, w, v) * static_cast<double>(v.rows());
    rows += v.rows();
  }
  if (rows == 0) throw EmptyData("no rows to evaluate the loss on");
  return total / static_cast<double>(rows);
}

double dist_cross_loss(const ModelKind& kind, const ParamVector& w_a, const DataView& data_a,
                       const ParamVector& w_b, const DataView& data_b) {
  return 0.5 * (loss(kind, w_b, data_a) + loss(kind, w_a, data_b));
}

double DistanceMetric::operator()(const Entity& a, const Entity& b) const {
  if (kind == DistanceKind::L2Params) return dist_l2(*a.model, *b.model);
  return 0.5 * (pooled_loss(model, *b.model, a.data, split) + pooled_loss(model, *a.model, b.data, split));
}

std::vector<double> DistanceMatrix::upper_triangle() const {
  std::vector<double> out;
  out.reserve(n_ * (n_ - (n_ > 0)) / 2);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) out.push_back((*this)(i, j));
  return out;
}

DistanceMatrix pairwise_matrix(std::span<const Entity> entities, const DistanceMetric& metric) {
  if (entities.empty()) throw EmptyData("pairwise matrix of no entities");
  DistanceMatrix m(entities.size());
  for (std::size_t i = 0; i < entities.size(); ++i)
    for (std::size_t j = i + 1; j < entities.size(); ++j) m.set(i, j, metric(entities[i], entities[j]));
  return m;
}

}  // namespace fedclust
