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

#include <algorithm>
#include <vector>

#include "fedclust/aggregation.hpp"
#include "fedclust/error.hpp"
#include "test_util.hpp"

namespace fedclust {
namespace {

using testing::identity_client;
using testing::l2;
using testing::linear_client;
using testing::randn_param;

std::vector<ParamVector> scalars(std::initializer_list<double> vs) {
  std::vector<ParamVector> out;
  for (double v : vs) out.push_back(ParamVector{v});
  return out;
}

TEST(TrMean, WorkedExamples) {
  EXPECT_EQ(trmean(scalars({1, 2, 3, 100}), 0.25)[0], 2.5);
  EXPECT_EQ(trmean(scalars({1, 2, 3}), 0.0)[0], 2.0);
  EXPECT_EQ(trmean(scalars({0, 1, 2, 3, 10}), 0.2)[0], 2.0);
}

TEST(TrMean, RetainedCountNormalization) {
  // J = 5, beta = 0.3: floor(1.5) = 1 per side, mean of the middle three.
  EXPECT_DOUBLE_EQ(trmean(scalars({9, 1, 4, 2, 100}), 0.3)[0], 5.0);
  EXPECT_EQ(trim_count(5, 0.3), 1u);
  EXPECT_EQ(trim_count(10, 0.25), 2u);
  EXPECT_EQ(trim_count(3, 0.49), 1u);
}

TEST(TrMean, Errors) {
  EXPECT_THROW(trmean(std::vector<ParamVector>{}, 0.1), EmptyData);
  EXPECT_THROW(trmean(std::vector<ParamVector>{ParamVector{1}, ParamVector{1, 2}}, 0.1), DimensionMismatch);
  EXPECT_THROW(trmean(scalars({1, 2}), 0.5), InvalidConfig);
  EXPECT_THROW(trmean(scalars({1, 2}), -0.1), InvalidConfig);
}

TEST(Mean, Examples) {
  const ParamVector v{1.5, -2, 3};
  EXPECT_EQ(mean(std::vector<ParamVector>{v}), v);
  ParamVector neg{-1.5, 2, -3};
  EXPECT_EQ(mean(std::vector<ParamVector>{v, neg}), ParamVector(3));
  EXPECT_THROW(mean(std::vector<ParamVector>{}), EmptyData);
}

TEST(TrMean, BetaZeroIsMeanExactly) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ParamVector> vs;
    for (int j = 0; j < 1 + trial % 9; ++j) vs.push_back(randn_param(rng, 4, 10.0));
    EXPECT_EQ(trmean(vs, 0.0), mean(vs));
  }
}

TEST(TrMean, PermutationInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t J = 2 + trial % 11;
    const double beta = 0.05 * (trial % 10);
    std::vector<ParamVector> vs;
    for (std::size_t j = 0; j < J; ++j) vs.push_back(randn_param(rng, 3));
    const auto ref = trmean(vs, beta);
    std::shuffle(vs.begin(), vs.end(), rng);
    const auto again = trmean(vs, beta);
    if (trim_count(J, beta) > 0) {
      EXPECT_EQ(again, ref);
    } else {
      // Plain mean: summation order moves the last bits only.
      for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(again[c], ref[c], 1e-13);
    }
  }
}

TEST(TrMean, BoundedByInliers) {
  Rng rng(3);
  std::uniform_real_distribution<double> in(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t J = 3 + trial % 15;
    const double beta = 0.05 + 0.44 * (trial % 7) / 6.0;
    const std::size_t k = trim_count(J, beta);
    std::vector<ParamVector> vs;
    for (std::size_t j = 0; j < J; ++j) vs.push_back(ParamVector{in(rng), in(rng)});
    std::uniform_int_distribution<std::size_t> pick(0, k);
    const std::size_t hi = pick(rng), lo = pick(rng);
    for (std::size_t j = 0; j < hi; ++j) vs[j][0] = 1e9 * (j + 1);
    for (std::size_t j = 0; j < lo; ++j) vs[J - 1 - j][0] = -1e9 * (j + 1);
    const auto out = trmean(vs, beta);
    EXPECT_GE(out[0], -1.0);
    EXPECT_LE(out[0], 1.0);
  }
}

TEST(Participation, SelectsCeilFractionSorted) {
  const auto all = select_participants(10, Participation{}, 0);
  EXPECT_EQ(all.size(), 10u);
  const Participation p{0.25, 7, 0};
  const auto a = select_participants(10, p, 3);
  EXPECT_EQ(a.size(), 3u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, select_participants(10, p, 3));
  EXPECT_EQ(select_participants(10, Participation{0.01, 7, 0}, 0).size(), 1u);
  bool differs = false;
  for (std::uint64_t r = 0; r < 10; ++r) differs |= select_participants(10, p, r) != a;
  EXPECT_TRUE(differs);
}

TEST(TrimmedMeanGd, SingleMemberBetaZeroIsLocalTraining) {
  Rng rng(4);
  const auto c = linear_client(0, randn_param(rng, 5), 30, 0.1, 3, 24);
  TrainConfig cfg;
  cfg.steps = 40;
  cfg.learning_rate = 0.05;
  const ModelKind k = ModelKind::linear(5);
  const ClientDataset* members[] = {&c};
  const auto w0 = randn_param(rng, 5);
  EXPECT_LE(l2(trimmed_mean_gd(k, members, w0, cfg), local_train(k, w0, c, cfg)), 1e-12);
}

TEST(TrimmedMeanGd, BetaZeroIsAverageLossGradientDescent) {
  Rng rng(5);
  std::vector<ClientDataset> cs;
  for (int i = 0; i < 5; ++i) cs.push_back(linear_client(i, randn_param(rng, 4), 10 + 3 * i, 0.3, 50 + i, 8 + i));
  std::vector<const ClientDataset*> ptrs;
  for (const auto& c : cs) ptrs.push_back(&c);
  TrainConfig cfg;
  cfg.steps = 25;
  cfg.learning_rate = 0.1;
  const ModelKind k = ModelKind::linear(4);

  // Direct oracle: average the five train-split gradients, step.
  ParamVector w(4);
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    std::vector<double> g(4, 0.0);
    for (const auto& c : cs) {
      const auto gi = gradient(k, w, c.view(Split::Train));
      for (std::size_t j = 0; j < 4; ++j) g[j] += gi[j] / 5.0;
    }
    for (std::size_t j = 0; j < 4; ++j) w[j] -= cfg.learning_rate * g[j];
  }
  EXPECT_LE(l2(trimmed_mean_gd(k, ptrs, ParamVector(4), cfg), w), 1e-12);
}

TEST(TrimmedMeanGd, LocalStepsAverageLocalModels) {
  Rng rng(6);
  std::vector<ClientDataset> cs;
  for (int i = 0; i < 3; ++i) cs.push_back(linear_client(i, randn_param(rng, 3), 12, 0.2, 70 + i, 12));
  std::vector<const ClientDataset*> ptrs;
  for (const auto& c : cs) ptrs.push_back(&c);
  TrainConfig cfg;
  cfg.steps = 4;
  cfg.local_steps = 3;
  cfg.learning_rate = 0.1;
  const ModelKind k = ModelKind::linear(3);
  ParamVector w(3);
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    TrainConfig local = cfg;
    local.steps = 3;
    ParamVector acc(3);
    for (const auto& c : cs) {
      const auto wi = local_train(k, w, c, local);
      for (std::size_t j = 0; j < 3; ++j) acc[j] += wi[j] / 3.0;
    }
    w = acc;
  }
  EXPECT_LE(l2(trimmed_mean_gd(k, ptrs, ParamVector(3), cfg), w), 1e-12);
}

TEST(TrimmedMeanGd, MemberOrderDoesNotMatter) {
  Rng rng(7);
  std::vector<ClientDataset> cs;
  for (int i = 0; i < 6; ++i) cs.push_back(linear_client(i, randn_param(rng, 3), 10, 0.5, 90 + i, 10));
  std::vector<const ClientDataset*> ptrs, rev;
  for (const auto& c : cs) ptrs.push_back(&c);
  rev.assign(ptrs.rbegin(), ptrs.rend());
  TrainConfig cfg;
  cfg.steps = 10;
  cfg.learning_rate = 0.1;
  cfg.trim_level = 0.2;
  const ModelKind k = ModelKind::linear(3);
  const Participation p{0.5, 3, 0};
  EXPECT_EQ(trimmed_mean_gd(k, ptrs, ParamVector(3), cfg, p), trimmed_mean_gd(k, rev, ParamVector(3), cfg, p));
}

TEST(TrimmedMeanGd, SharedQuadraticContracts) {
  Rng rng(8);
  const auto w_star = randn_param(rng, 4);
  std::vector<ClientDataset> cs;
  for (int i = 0; i < 6; ++i) cs.push_back(identity_client(i, w_star));
  std::vector<const ClientDataset*> ptrs;
  for (const auto& c : cs) ptrs.push_back(&c);
  const auto w0 = randn_param(rng, 4, 3.0);
  for (double eta : {0.5, 1.0}) {
    TrainConfig cfg;
    cfg.steps = 12;
    cfg.learning_rate = eta;
    cfg.trim_level = 0.2;
    const auto w = trimmed_mean_gd(ModelKind::linear(4), ptrs, w0, cfg);
    EXPECT_LE(l2(w, w_star), std::pow(1 - eta, 12) * l2(w0, w_star) + 1e-12);
  }
}

TEST(TrimmedMeanGd, TrimmingRemovesAdversaries) {
  Rng rng(9);
  const std::size_t d = 5;
  const auto w_star = randn_param(rng, d);
  std::vector<ClientDataset> cs;
  for (int i = 0; i < 8; ++i) cs.push_back(linear_client(i, w_star, 40, 0.0, 200 + i, 40));
  const ModelKind k = ModelKind::linear(d);
  std::vector<Member> all, honest;
  for (const auto& c : cs) {
    all.push_back(honest_member(k, c));
    honest.push_back(honest_member(k, c));
  }
  for (int a = 8; a < 10; ++a) {
    Member bad;
    bad.id = a;
    bad.gradient = [d](const ParamVector&) { return ParamVector(d, 1e6); };
    bad.local_update = [d](const ParamVector&, const TrainConfig&) { return ParamVector(d, 1e6); };
    all.push_back(bad);
  }
  TrainConfig cfg;
  cfg.steps = 300;
  cfg.learning_rate = 0.2;
  cfg.trim_level = 0.25;
  const auto robust = trimmed_mean_gd(all, ParamVector(d), cfg);
  TrainConfig plain = cfg;
  plain.trim_level = 0.0;
  const auto oracle = trimmed_mean_gd(honest, ParamVector(d), plain);
  EXPECT_LE(l2(robust, oracle), 1e-3);
  EXPECT_LE(l2(oracle, w_star), 1e-6);

  plain.steps = 3;
  EXPECT_GT(l2(trimmed_mean_gd(all, ParamVector(d), plain), oracle), 1e3);
}

TEST(TrimmedMeanGd, ProjectionKeepsIterateInBall) {
  Rng rng(10);
  const auto c = linear_client(0, ParamVector(3, 10.0), 20, 0.0, 4, 20);
  const ClientDataset* members[] = {&c};
  TrainConfig cfg;
  cfg.steps = 50;
  cfg.learning_rate = 0.1;
  cfg.projection_diameter = 2.0;
  std::vector<ParamVector> trace;
  trimmed_mean_gd(ModelKind::linear(3), members, ParamVector(3), cfg, {}, &trace);
  ASSERT_EQ(trace.size(), 51u);
  for (const auto& w : trace) EXPECT_LE(norm(w), 1.0 + 1e-12);
}

TEST(TrimmedMeanGd, DivergenceAndEmptyInput) {
  Rng rng(11);
  const auto c = linear_client(0, randn_param(rng, 3), 20, 0.1, 4, 20);
  const ClientDataset* members[] = {&c};
  TrainConfig cfg;
  cfg.steps = 500;
  cfg.learning_rate = 50.0;
  EXPECT_THROW(trimmed_mean_gd(ModelKind::linear(3), members, ParamVector(3), cfg), Divergence);
  EXPECT_THROW(trimmed_mean_gd(std::span<const Member>{}, ParamVector(3), TrainConfig{}), EmptyData);
}

}  // namespace
}  // namespace fedclust
