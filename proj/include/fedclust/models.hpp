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
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "fedclust/dataset.hpp"

namespace fedclust {

/// Flattened model parameters. The length is fixed at construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& vec() const { return values_; }

  bool all_finite() const;
  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
};

double norm(const ParamVector& v);

/// The two supported model families.
///  - LinearRegression: params are w in R^d, loss (1/2n) sum (<x,w> - y)^2.
///  - MultinomialLogistic: params are K rows of d weights, mean cross-entropy.
struct ModelKind {
  enum class Family { LinearRegression, MultinomialLogistic };

  Family family = Family::LinearRegression;
  std::size_t features = 0;
  std::size_t classes = 1;

  static ModelKind linear(std::size_t d) { return {Family::LinearRegression, d, 1}; }
  static ModelKind logistic(std::size_t d, std::size_t k) {
    return {Family::MultinomialLogistic, d, k};
  }

  std::size_t param_dim() const {
    return family == Family::LinearRegression ? features : features * classes;
  }
  bool is_classifier() const { return family == Family::MultinomialLogistic; }
  bool operator==(const ModelKind&) const = default;
};

struct TrainConfig {
  std::size_t steps = 1;                      // T
  double learning_rate = 0.1;                 // eta
  std::optional<double> projection_diameter;  // D; nullopt = unbounded
  std::size_t local_steps = 1;
  double trim_level = 0.0;  // beta
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;      // minibatch stream only

  /// Throws InvalidConfig unless eta > 0, T >= 1, 0 <= beta < 0.5, local_steps >= 1.
  void validate() const;
};

/// Loss above which training is considered divergent.
inline constexpr double kDivergenceThreshold = 1e12;

double loss(const ModelKind& kind, const ParamVector& params, const DataView& data);
ParamVector gradient(const ModelKind& kind, const ParamVector& params, const DataView& data);

/// Computes both in one pass over the data; `grad` is overwritten.
double loss_and_gradient(const ModelKind& kind, const ParamVector& params, const DataView& data,
                         ParamVector& grad);

/// Fraction of correctly classified rows; nullopt for regression.
std::optional<double> accuracy(const ModelKind& kind, const ParamVector& params,
                               const DataView& data);

/// Euclidean projection onto the origin-centred ball of diameter D.
ParamVector project(ParamVector params, std::optional<double> diameter);

/// Upper bound on the smoothness constant L of the empirical risk, from the
/// largest eigenvalue of X^T X / n (power iteration). For the logistic
/// family the bound is half of that.
double smoothness_constant(const ModelKind& kind, const DataView& data);

/// Projected gradient descent for `steps` steps on one data block. When
/// `losses` is given it receives the loss at each iterate w_0..w_steps.
ParamVector gd_steps(const ModelKind& kind, ParamVector w, const DataView& data,
                     const TrainConfig& cfg, std::size_t steps,
                     std::vector<double>* losses = nullptr);

/// T steps of projected GD on the client's train split (minibatched when
/// cfg.batch_size > 0). Throws Divergence on a non-finite or exploding loss.
ParamVector local_train(const ModelKind& kind, const ParamVector& w0, const ClientDataset& data,
                        const TrainConfig& cfg, std::vector<double>* losses = nullptr);

}  // namespace fedclust
