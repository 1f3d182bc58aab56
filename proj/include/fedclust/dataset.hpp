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
#include <vector>

namespace fedclust {

enum class Split { Train, Test, All };

/// Contiguous block of samples: `rows` feature rows of width `dim` plus one
/// target per row (a real value or a class index stored as double).
struct DataView {
  std::span<const double> features;
  std::span<const double> targets;
  std::size_t dim = 0;

  std::size_t rows() const { return targets.size(); }
  bool empty() const { return targets.empty(); }
  std::span<const double> row(std::size_t i) const { return features.subspan(i * dim, dim); }
};

/// One client's samples. Rows [0, train_count) form the train split and the
/// remaining rows the test split.
struct ClientDataset {
  int client_id = 0;
  std::size_t dim = 0;
  std::vector<double> features;  // row-major, size() * dim
  std::vector<double> targets;
  std::size_t train_count = 0;

  std::size_t size() const { return targets.size(); }
  std::size_t test_count() const { return size() - train_count; }

  DataView view(Split split) const {
    std::size_t begin = 0, end = size();
    if (split == Split::Train) end = train_count;
    if (split == Split::Test) begin = train_count;
    return DataView{std::span<const double>(features).subspan(begin * dim, (end - begin) * dim),
                    std::span<const double>(targets).subspan(begin, end - begin), dim};
  }

  bool operator==(const ClientDataset&) const = default;
};

/// Train split size for n samples at the given fraction: round(n * f),
/// clamped so both splits are non-empty whenever n >= 2.
std::size_t train_count_for(std::size_t n, double train_fraction);

}  // namespace fedclust
