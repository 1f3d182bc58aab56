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
#include <span>
#include <string>
#include <vector>

#include "fedclust/dataset.hpp"
#include "fedclust/models.hpp"

namespace fedclust {

enum class DistanceKind { L2Params, CrossClusterLoss };

std::string to_string(DistanceKind k);
DistanceKind parse_distance_kind(const std::string& s);  // "l2" | "cross-loss"

/// Something that can be compared: a model plus the data it stands for. A
/// client contributes its own dataset, a cluster the union of its members'.
struct Entity {
  const ParamVector* model = nullptr;
  std::vector<const ClientDataset*> data;
};

/// ||a - b||_2.
double dist_l2(const ParamVector& a, const ParamVector& b);

/// Sample-weighted mean loss of `w` over the chosen split of several datasets.
double pooled_loss(const ModelKind& kind, const ParamVector& w,
                   std::span<const ClientDataset* const> data, Split split);

/// 1/2 (loss(w_b on a) + loss(w_a on b)). Symmetric; not a metric.
double dist_cross_loss(const ModelKind& kind, const ParamVector& w_a, const DataView& data_a,
                       const ParamVector& w_b, const DataView& data_b);

struct DistanceMetric {
  DistanceKind kind = DistanceKind::L2Params;
  ModelKind model;
  Split split = Split::Train;  // cross-loss only

  double operator()(const Entity& a, const Entity& b) const;
};

/// Dense symmetric matrix with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), v_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double d) {
    v_[i * n_ + j] = d;
    v_[j * n_ + i] = d;
  }
  /// Upper-triangle entries (i < j) in row order.
  std::vector<double> upper_triangle() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> v_;
};

DistanceMatrix pairwise_matrix(std::span<const Entity> entities, const DistanceMetric& metric);

}  // namespace fedclust
