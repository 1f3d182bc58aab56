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

#include "fedclust/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedclust/error.hpp"
#include "fedclust/kernels.hpp"
#include "fedclust/rng.hpp"

namespace fedclust {

std::size_t train_count_for(std::size_t n, double train_fraction) {
  if (n <= 1) return n;
  auto k = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

bool ParamVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double norm(const ParamVector& v) { return std::sqrt(simd::sq_norm(v.values())); }

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw InvalidConfig("learning rate must be positive");
  if (steps < 1) throw InvalidConfig("steps must be >= 1");
  if (local_steps < 1) throw InvalidConfig("local_steps must be >= 1");
  if (!(trim_level >= 0.0 && trim_level < 0.5)) throw InvalidConfig("trim level must be in [0, 0.5)");
  if (projection_diameter && !(*projection_diameter > 0.0))
    throw InvalidConfig("projection diameter must be positive");
}

namespace {

void check_inputs(const ModelKind& kind, const ParamVector& params, const DataView& data) {
  if (params.size() != kind.param_dim())
    throw DimensionMismatch("parameter vector", kind.param_dim(), params.size());
  if (data.dim != kind.features) throw DimensionMismatch("feature width", kind.features, data.dim);
  if (data.empty()) throw EmptyData("evaluation split is empty");
}

std::size_t class_of(double target, std::size_t classes) {
  const auto k = static_cast<long long>(target);
  if (k < 0 || static_cast<std::size_t>(k) >= classes || static_cast<double>(k) != target)
    throw Error("class label " + std::to_string(target) + " outside [0, " +
                std::to_string(classes) + ")");
  return static_cast<std::size_t>(k);
}

// Softmax cross-entropy for one row. Fills `probs` with the softmax and
// returns -log p_y.
double softmax_xent(const ModelKind& kind, const ParamVector& params, std::span<const double> x,
                    std::size_t y, std::vector<double>& probs) {
  const std::size_t d = kind.features;
  probs.resize(kind.classes);
  simd::matvec(params.values(), kind.classes, d, x, probs);
  const double zy = probs[y];
  const double zmax = *std::max_element(probs.begin(), probs.end());
  double sum = 0.0;
  for (double& p : probs) {
    p = std::exp(p - zmax);
    sum += p;
  }
  for (double& p : probs) p /= sum;
  return zmax + std::log(sum) - zy;
}

}  // namespace

double loss(const ModelKind& kind, const ParamVector& params, const DataView& data) {
  check_inputs(kind, params, data);
  const std::size_t n = data.rows();
  if (kind.family == ModelKind::Family::LinearRegression) {
    std::vector<double> pred(n);
    simd::matvec(data.features, n, data.dim, params.values(), pred);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = pred[i] - data.targets[i];
      s += r * r;
    }
    return 0.5 * s / static_cast<double>(n);
  }
  std::vector<double> probs;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += softmax_xent(kind, params, data.row(i), class_of(data.targets[i], kind.classes), probs);
  return s / static_cast<double>(n);
}

double loss_and_gradient(const ModelKind& kind, const ParamVector& params, const DataView& data,
                         ParamVector& grad) {
  check_inputs(kind, params, data);
  const std::size_t n = data.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  grad = ParamVector(kind.param_dim());
  if (kind.family == ModelKind::Family::LinearRegression) {
    std::vector<double> resid(n);
    simd::matvec(data.features, n, data.dim, params.values(), resid);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid[i] -= data.targets[i];
      s += resid[i] * resid[i];
      resid[i] *= inv_n;
    }
    simd::matvec_t_acc(data.features, n, data.dim, resid, grad.values());
    return 0.5 * s * inv_n;
  }
  const std::size_t d = kind.features;
  std::vector<double> probs;
  double s = 0.0;
  auto g = grad.values();
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = data.row(i);
    const std::size_t y = class_of(data.targets[i], kind.classes);
    s += softmax_xent(kind, params, x, y, probs);
    for (std::size_t k = 0; k < kind.classes; ++k) {
      const double coef = (probs[k] - (k == y ? 1.0 : 0.0)) * inv_n;
      simd::axpy(coef, x, g.subspan(k * d, d));
    }
  }
  return s * inv_n;
}

ParamVector gradient(const ModelKind& kind, const ParamVector& params, const DataView& data) {
  ParamVector g;
  loss_and_gradient(kind, params, data, g);
  return g;
}

std::optional<double> accuracy(const ModelKind& kind, const ParamVector& params,
                               const DataView& data) {
  if (!kind.is_classifier()) return std::nullopt;
  check_inputs(kind, params, data);
  std::vector<double> logits(kind.classes);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    simd::matvec(params.values(), kind.classes, kind.features, data.row(i), logits);
    const auto best = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == class_of(data.targets[i], kind.classes)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.rows());
}

ParamVector project(ParamVector params, std::optional<double> diameter) {
  if (!diameter) return params;
  const double radius = 0.5 * *diameter;
  const double nrm = norm(params);
  if (nrm > radius) {
    const double scale = radius / nrm;
    for (double& v : params.values()) v *= scale;
  }
  return params;
}

double smoothness_constant(const ModelKind& kind, const DataView& data) {
  if (data.empty()) throw EmptyData("smoothness constant of an empty split");
  const std::size_t n = data.rows(), d = data.dim;
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> xv(n), next(d);
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    simd::matvec(data.features, n, d, v, xv);
    std::fill(next.begin(), next.end(), 0.0);
    simd::matvec_t_acc(data.features, n, d, xv, next);
    const double nrm = std::sqrt(simd::sq_norm(next));
    if (nrm == 0.0) break;
    const double est = nrm / static_cast<double>(n);
    for (std::size_t k = 0; k < d; ++k) v[k] = next[k] / nrm;
    if (std::abs(est - lambda) <= 1e-12 * est) {
      lambda = est;
      break;
    }
    lambda = est;
  }
  return kind.is_classifier() ? 0.5 * lambda : lambda;
}

namespace {

void guard(double value, std::size_t step) {
  if (!std::isfinite(value) || value > kDivergenceThreshold)
    throw Divergence("loss diverged at step " + std::to_string(step) + " (" +
                     std::to_string(value) + ")");
}

void descend(ParamVector& w, const ParamVector& g, const TrainConfig& cfg) {
  simd::axpy(-cfg.learning_rate, g.values(), w.values());
  w = project(std::move(w), cfg.projection_diameter);
}

}  // namespace

ParamVector gd_steps(const ModelKind& kind, ParamVector w, const DataView& data,
                     const TrainConfig& cfg, std::size_t steps, std::vector<double>* losses) {
  ParamVector g;
  for (std::size_t t = 0; t < steps; ++t) {
    const double f = loss_and_gradient(kind, w, data, g);
    guard(f, t);
    if (losses) losses->push_back(f);
    descend(w, g, cfg);
  }
  const double f = loss(kind, w, data);
  guard(f, steps);
  if (losses) losses->push_back(f);
  return w;
}

ParamVector local_train(const ModelKind& kind, const ParamVector& w0, const ClientDataset& data,
                        const TrainConfig& cfg, std::vector<double>* losses) {
  cfg.validate();
  const DataView train = data.view(Split::Train);
  if (train.empty()) throw EmptyData("client " + std::to_string(data.client_id) + " has no training rows");
  if (cfg.batch_size == 0 || cfg.batch_size >= train.rows())
    return gd_steps(kind, w0, train, cfg, cfg.steps, losses);

  const std::size_t b = cfg.batch_size, d = train.dim;
  std::vector<std::size_t> order(train.rows());
  std::vector<double> xb(b * d), yb(b);
  ParamVector w = w0, g;
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(data.client_id), StreamTag::Minibatch, t);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < b; ++i) {
      const auto row = train.row(order[i]);
      std::copy(row.begin(), row.end(), xb.begin() + static_cast<std::ptrdiff_t>(i * d));
      yb[i] = train.targets[order[i]];
    }
    const double f = loss_and_gradient(kind, w, DataView{xb, yb, d}, g);
    guard(f, t);
    if (losses) losses->push_back(f);
    descend(w, g, cfg);
  }
  const double f = loss(kind, w, train);
  guard(f, cfg.steps);
  if (losses) losses->push_back(f);
  return w;
}

}  // namespace fedclust
