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

#include "fedclust/baselines.hpp"

#include <limits>
#include <random>

#include "fedclust/error.hpp"
#include "fedclust/rng.hpp"

namespace fedclust {

EvalSummary evaluate_clients(const FederatedDataset& fd,
                             const std::function<const ParamVector&(std::size_t)>& model_of) {
  EvalSummary e;
  double acc_sum = 0.0;
  for (std::size_t i = 0; i < fd.num_clients(); ++i) {
    const DataView test = fd.clients[i].view(Split::Test);
    const ParamVector& w = model_of(i);
    e.client_test_loss.push_back(loss(fd.kind, w, test));
    if (auto a = accuracy(fd.kind, w, test)) acc_sum += *a;
  }
  double s = 0.0;
  for (double l : e.client_test_loss) s += l;
  const auto m = static_cast<double>(fd.num_clients());
  e.mean_test_loss = s / m;
  if (fd.kind.is_classifier()) e.mean_test_accuracy = acc_sum / m;
  return e;
}

LocalResult train_local(const FederatedDataset& fd, const TrainConfig& cfg) {
  cfg.validate();
  LocalResult r;
  const ParamVector w0(fd.kind.param_dim());
  for (const auto& c : fd.clients) r.models.push_back(local_train(fd.kind, w0, c, cfg));
  r.eval = evaluate_clients(fd, [&](std::size_t i) -> const ParamVector& { return r.models[i]; });
  return r;
}

GlobalResult fedavg_global(const FederatedDataset& fd, const TrainConfig& cfg,
                           const Participation& participation, std::optional<ParamVector> w0,
                           std::vector<ParamVector>* trace) {
  cfg.validate();
  GlobalResult r;
  r.model = w0 ? *w0 : ParamVector(fd.kind.param_dim());
  if (r.model.size() != fd.kind.param_dim()) throw DimensionMismatch("fedavg initial model", fd.kind.param_dim(), r.model.size());
  if (trace) trace->push_back(r.model);
  std::vector<ParamVector> locals;
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    locals.clear();
    for (std::size_t i : select_participants(fd.num_clients(), participation, t))
      locals.push_back(gd_steps(fd.kind, r.model, fd.clients[i].view(Split::Train), cfg, cfg.local_steps));
    r.model = mean(locals);
    if (trace) trace->push_back(r.model);
  }
  r.eval = evaluate_clients(fd, [&](std::size_t) -> const ParamVector& { return r.model; });
  return r;
}

void IfcaConfig::validate() const {
  if (clusters < 1) throw InvalidConfig("IFCA needs K >= 1");
  if (!(participation_fraction > 0.0 && participation_fraction <= 1.0))
    throw InvalidConfig("participation fraction must be in (0, 1]");
  if (!(init_low <= init_high)) throw InvalidConfig("IFCA init range is empty");
  if (initial_models && initial_models->size() != clusters)
    throw InvalidConfig("IFCA initial models must hold K entries");
  train.validate();
}

std::vector<ParamVector> ifca_initial_models(const IfcaConfig& cfg, std::size_t dim) {
  if (cfg.initial_models) return *cfg.initial_models;
  std::vector<ParamVector> out;
  for (std::size_t k = 0; k < cfg.clusters; ++k) {
    Rng rng = make_rng(cfg.seed, k, StreamTag::IfcaInit);
    std::uniform_real_distribution<double> u(cfg.init_low, cfg.init_high);
    ParamVector w(dim);
    for (double& v : w.values()) v = u(rng);
    out.push_back(std::move(w));
  }
  return out;
}

Participation ifca_participation(const IfcaConfig& cfg) {
  return Participation{cfg.participation_fraction, derive_seed(cfg.seed, 0, StreamTag::Participation), 0};
}

namespace {

std::size_t best_model(const FederatedDataset& fd, const std::vector<ParamVector>& models, std::size_t client) {
  const DataView train = fd.clients[client].view(Split::Train);
  std::size_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < models.size(); ++k) {
    const double l = loss(fd.kind, models[k], train);
    if (l < best) {
      best = l;
      arg = k;
    }
  }
  return arg;
}

}  // namespace

IfcaResult ifca(const FederatedDataset& fd, const IfcaConfig& cfg,
                std::vector<std::vector<ParamVector>>* trace) {
  cfg.validate();
  IfcaResult r;
  r.models = ifca_initial_models(cfg, fd.kind.param_dim());
  for (const auto& w : r.models)
    if (w.size() != fd.kind.param_dim()) throw DimensionMismatch("IFCA initial model", fd.kind.param_dim(), w.size());
  if (trace) trace->push_back(r.models);
  const Participation part = ifca_participation(cfg);
  std::vector<std::vector<ParamVector>> returned(cfg.clusters);
  for (std::size_t t = 0; t < cfg.effective_rounds(); ++t) {
    for (auto& v : returned) v.clear();
    std::vector<int> assign(fd.num_clients(), Clustering::kUnassigned);
    for (std::size_t i : select_participants(fd.num_clients(), part, t)) {
      const std::size_t k = best_model(fd, r.models, i);
      assign[i] = static_cast<int>(k);
      returned[k].push_back(gd_steps(fd.kind, r.models[k], fd.clients[i].view(Split::Train), cfg.train,
                                     cfg.train.local_steps));
    }
    for (std::size_t k = 0; k < cfg.clusters; ++k)
      if (!returned[k].empty()) r.models[k] = mean(returned[k]);
    r.assignments.push_back(std::move(assign));
    if (trace) trace->push_back(r.models);
  }
  std::vector<int> final_assign(fd.num_clients());
  for (std::size_t i = 0; i < fd.num_clients(); ++i) final_assign[i] = static_cast<int>(best_model(fd, r.models, i));
  r.eval = evaluate_clients(fd, [&](std::size_t i) -> const ParamVector& {
    return r.models[static_cast<std::size_t>(final_assign[i])];
  });
  r.clustering = Clustering(final_assign);
  return r;
}

}  // namespace fedclust
