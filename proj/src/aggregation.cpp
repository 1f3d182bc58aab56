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

#include "fedclust/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedclust/error.hpp"
#include "fedclust/kernels.hpp"
#include "fedclust/rng.hpp"

namespace fedclust {

std::size_t trim_count(std::size_t count, double beta) {
  return static_cast<std::size_t>(std::floor(beta * static_cast<double>(count)));
}

namespace {

std::size_t common_dim(std::span<const ParamVector> vectors, const char* what) {
  if (vectors.empty()) throw EmptyData(std::string(what) + " of no vectors");
  const std::size_t d = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != d) throw DimensionMismatch(what, d, v.size());
  return d;
}

}  // namespace

ParamVector trmean(std::span<const ParamVector> vectors, double beta) {
  const std::size_t d = common_dim(vectors, "trmean");
  if (!(beta >= 0.0 && beta < 0.5)) throw InvalidConfig("trim level must be in [0, 0.5)");
  const std::size_t J = vectors.size();
  const std::size_t k = trim_count(J, beta);
  if (J <= 2 * k) throw OverTrim("trimming " + std::to_string(k) + " per side leaves nothing of " + std::to_string(J));
  if (k == 0) return mean(vectors);

  // Equal values are interchangeable, so a plain value sort is a total order
  // on what gets kept.
  ParamVector out(d);
  std::vector<double> column(J);
  const double retained = static_cast<double>(J - 2 * k);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t j = 0; j < J; ++j) column[j] = vectors[j][c];
    std::sort(column.begin(), column.end());
    double s = 0.0;
    for (std::size_t j = k; j < J - k; ++j) s += column[j];
    out[c] = s / retained;
  }
  return out;
}

ParamVector mean(std::span<const ParamVector> vectors) {
  const std::size_t d = common_dim(vectors, "mean");
  ParamVector out(d);
  for (const auto& v : vectors) simd::axpy(1.0, v.values(), out.values());
  const double inv = 1.0 / static_cast<double>(vectors.size());
  for (double& x : out.values()) x *= inv;
  return out;
}

Member honest_member(const ModelKind& kind, const ClientDataset& data) {
  const ClientDataset* c = &data;
  Member m;
  m.id = data.client_id;
  m.gradient = [kind, c](const ParamVector& w) { return gradient(kind, w, c->view(Split::Train)); };
  m.local_update = [kind, c](const ParamVector& w, const TrainConfig& cfg) {
    return gd_steps(kind, w, c->view(Split::Train), cfg, cfg.local_steps);
  };
  return m;
}

std::vector<std::size_t> select_participants(std::size_t count, const Participation& p,
                                              std::uint64_t round) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (p.fraction >= 1.0 || count <= 1) return idx;
  if (!(p.fraction > 0.0)) throw InvalidConfig("participation fraction must be in (0, 1]");
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(p.fraction * static_cast<double>(count) - 1e-12)));
  Rng rng = make_rng(p.seed, p.stream_id, StreamTag::Participation, round);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

ParamVector trimmed_mean_gd(std::span<const Member> members, const ParamVector& w0,
                            const TrainConfig& cfg, const Participation& participation,
                            std::vector<ParamVector>* trace) {
  cfg.validate();
  if (members.empty()) throw EmptyData("trimmed_mean_gd needs at least one member");
  // Fold over members in id order so the result never depends on the caller's ordering.
  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return members[a].id < members[b].id; });

  ParamVector w = project(w0, cfg.projection_diameter);
  if (trace) trace->push_back(w);
  std::vector<ParamVector> reports;
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    const auto chosen = select_participants(members.size(), participation, t);
    reports.clear();
    for (std::size_t j : chosen) {
      const Member& mem = members[order[j]];
      reports.push_back(cfg.local_steps == 1 ? mem.gradient(w) : mem.local_update(w, cfg));
    }
    if (cfg.local_steps == 1) {
      const ParamVector g = trmean(reports, cfg.trim_level);
      simd::axpy(-cfg.learning_rate, g.values(), w.values());
      w = project(std::move(w), cfg.projection_diameter);
    } else {
      w = trmean(reports, cfg.trim_level);
    }
    if (!w.all_finite() || norm(w) > kDivergenceThreshold)
      throw Divergence("trimmed-mean iterate diverged at round " + std::to_string(t));
    if (trace) trace->push_back(w);
  }
  return w;
}

ParamVector trimmed_mean_gd(const ModelKind& kind, std::span<const ClientDataset* const> members,
                            const ParamVector& w0, const TrainConfig& cfg,
                            const Participation& participation, std::vector<ParamVector>* trace) {
  std::vector<Member> ms;
  ms.reserve(members.size());
  for (const ClientDataset* c : members) ms.push_back(honest_member(kind, *c));
  return trimmed_mean_gd(ms, w0, cfg, participation, trace);
}

}  // namespace fedclust
