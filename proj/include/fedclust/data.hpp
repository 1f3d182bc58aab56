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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedclust/clustering.hpp"
#include "fedclust/dataset.hpp"
#include "fedclust/models.hpp"

namespace fedclust {

/// Mixture of linear regressions: C cluster models with iid Bernoulli(0.5)
/// coordinates in {0,1}, x ~ N(0, I_d), y = <x, w*_c> + N(0, sigma^2).
/// Clients are divided equally, client i belonging to cluster i / (m / C).
struct SyntheticSpec {
  std::size_t m = 100;
  std::size_t n = 100;
  std::size_t d = 1000;
  std::size_t clusters = 2;
  double sigma = 0.001;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

/// Generating distribution of a synthetic federation; kept so clients can be
/// resampled.
struct SyntheticOrigin {
  SyntheticSpec spec;
  std::vector<ParamVector> cluster_models;
  std::uint64_t round = 0;
  bool operator==(const SyntheticOrigin&) const = default;
};

struct FederatedDataset {
  std::vector<ClientDataset> clients;
  std::optional<Clustering> ground_truth;
  ModelKind kind;
  std::optional<SyntheticOrigin> origin;

  std::size_t num_clients() const { return clients.size(); }
  /// Ids contiguous 0..m-1, consistent widths, ground truth covering all clients.
  void validate() const;
  bool operator==(const FederatedDataset&) const = default;
};

FederatedDataset gen_mixture_linreg(const SyntheticSpec& spec);

/// Fresh samples for every client from the same cluster models, drawn from
/// streams keyed by (seed, client, round). Throws NotSynthetic when the
/// federation carries no generating distribution.
FederatedDataset resample_clients(const FederatedDataset& fd, std::uint64_t round);

/// Labelled rows of flattened square images, labels are class indices.
struct Table {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t rows() const { return labels.size(); }
};

/// Reads `feature..., label` rows without a header.
Table load_table_csv(const std::filesystem::path& path);

struct Transform {
  enum class Kind { Identity, Rotate, Invert };
  Kind kind = Kind::Identity;
  int quarter_turns = 0;  // clockwise, Rotate only

  static Transform parse(const std::string& name);  // identity, rot90, rot180, rot270, invert
  std::string name() const;
};

/// Clockwise quarter turn of a flattened side x side image.
std::vector<double> rotate90(std::span<const double> image, std::size_t side);
/// x -> 1 - x per pixel.
std::vector<double> invert_pixels(std::span<const double> image);
std::vector<double> apply_transform(const Transform& t, std::span<const double> image);

/// Shuffles the base rows into m disjoint shards of n, assigns client i to
/// transforms[i % T] and transforms its features. Ground truth is the
/// transform index; the model is multinomial logistic over the label set.
FederatedDataset make_transform_splits(const Table& base, const std::vector<Transform>& transforms,
                                       std::size_t m, std::size_t n, std::uint64_t seed,
                                       double train_fraction = 0.8);

/// Directory layout: meta.json, client_<id>.csv (features then target per
/// row, 17 significant digits) and optional ground_truth.csv.
void save_federated_csv(const FederatedDataset& fd, const std::filesystem::path& dir);
FederatedDataset load_federated_csv(const std::filesystem::path& dir);

}  // namespace fedclust
