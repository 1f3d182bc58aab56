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
#include <fstream>
#include <numeric>
#include <set>
#include <unistd.h>

#include "fedclust/data.hpp"
#include "fedclust/error.hpp"
#include "fedclust/models.hpp"
#include "test_util.hpp"

namespace fedclust {
namespace {

namespace fs = std::filesystem;
using testing::l2;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fedclust_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  return dir;
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.m = 6;
  s.n = 10;
  s.d = 4;
  s.clusters = 2;
  s.sigma = 0.1;
  s.seed = 11;
  return s;
}

TEST(Synthetic, PaperSizedFederation) {
  SyntheticSpec s;  // defaults: m=100, n=100, d=1000, C=2, sigma=0.001
  s.seed = 1;
  const auto fd = gen_mixture_linreg(s);
  ASSERT_EQ(fd.num_clients(), 100u);
  ASSERT_TRUE(fd.ground_truth);
  EXPECT_EQ(fd.ground_truth->sizes(), (std::vector<std::size_t>{50, 50}));
  for (const auto& c : fd.clients) {
    EXPECT_EQ(c.size(), 100u);
    EXPECT_EQ(c.dim, 1000u);
    EXPECT_EQ(c.train_count, 80u);
  }
  EXPECT_EQ(fd.kind, ModelKind::linear(1000));
  fd.validate();
}

TEST(Synthetic, NoiselessClientsAreInterpolatedByTheirClusterModel) {
  auto s = small_spec();
  s.sigma = 0.0;
  const auto fd = gen_mixture_linreg(s);
  for (std::size_t i = 0; i < fd.num_clients(); ++i) {
    const auto& w = fd.origin->cluster_models[static_cast<std::size_t>(fd.ground_truth->cluster_of(i))];
    EXPECT_LT(loss(fd.kind, w, fd.clients[i].view(Split::All)), 1e-28);
  }
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto a = gen_mixture_linreg(small_spec());
  const auto b = gen_mixture_linreg(small_spec());
  EXPECT_EQ(a, b);
  auto s = small_spec();
  s.seed = 12;
  EXPECT_NE(gen_mixture_linreg(s).clients[0].features, a.clients[0].features);
}

TEST(Synthetic, BernoulliModelsInZeroOne) {
  auto s = small_spec();
  s.d = 200;
  const auto fd = gen_mixture_linreg(s);
  for (const auto& w : fd.origin->cluster_models)
    for (double v : w.vec()) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(Synthetic, RejectsUnevenSplit) {
  auto s = small_spec();
  s.m = 7;
  EXPECT_THROW(gen_mixture_linreg(s), InvalidConfig);
  s.m = 6;
  s.sigma = -1;
  EXPECT_THROW(gen_mixture_linreg(s), InvalidConfig);
}

TEST(Synthetic, FeatureMoments) {
  SyntheticSpec s;
  s.m = 10;
  s.n = 100;
  s.d = 1000;
  s.seed = 3;
  const auto fd = gen_mixture_linreg(s);
  double sum = 0.0, sq = 0.0;
  std::size_t count = 0;
  for (const auto& c : fd.clients)
    for (double v : c.features) {
      sum += v;
      sq += v * v;
      ++count;
    }
  ASSERT_EQ(count, 1000000u);
  const double mean = sum / count;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / count - mean * mean, 1.0, 0.01);
}

TEST(Synthetic, ClusterModelsWellSeparated) {
  for (std::uint64_t seed : {1, 2, 3}) {
    SyntheticSpec s;
    s.m = 2;
    s.n = 2;
    s.seed = seed;
    const auto fd = gen_mixture_linreg(s);
    EXPECT_GT(l2(fd.origin->cluster_models[0], fd.origin->cluster_models[1]), 15.0) << seed;
  }
}

TEST(Resample, KeepsModelsRedrawsData) {
  auto s = small_spec();
  s.sigma = 0.0;
  const auto fd = gen_mixture_linreg(s);
  const auto r1 = resample_clients(fd, 1), r2 = resample_clients(fd, 2);
  EXPECT_EQ(r1.origin->cluster_models, fd.origin->cluster_models);
  EXPECT_EQ(r1.ground_truth, fd.ground_truth);
  EXPECT_EQ(r2.ground_truth, fd.ground_truth);
  EXPECT_NE(r1.clients[0].features, fd.clients[0].features);
  EXPECT_NE(r1.clients[0].features, r2.clients[0].features);
  EXPECT_EQ(resample_clients(fd, 1), r1);
  for (std::size_t i = 0; i < r1.num_clients(); ++i) {
    const auto& w = r1.origin->cluster_models[static_cast<std::size_t>(r1.ground_truth->cluster_of(i))];
    EXPECT_LT(loss(r1.kind, w, r1.clients[i].view(Split::All)), 1e-28);
  }
  auto plain = fd;
  plain.origin.reset();
  EXPECT_THROW(resample_clients(plain, 1), NotSynthetic);
}

TEST(Transforms, RotateClockwise) {
  // [a b; c d] -> [c a; d b]
  EXPECT_EQ(rotate90(std::vector<double>{1, 2, 3, 4}, 2), (std::vector<double>{3, 1, 4, 2}));
  std::vector<double> img(9);
  std::iota(img.begin(), img.end(), 0.0);
  auto r = img;
  for (int k = 0; k < 4; ++k) r = rotate90(r, 3);
  EXPECT_EQ(r, img);
  EXPECT_NE(rotate90(img, 3), img);
}

TEST(Transforms, InvertIsInvolution) {
  const std::vector<double> img{0.0, 0.25, 1.0, 0.5};
  EXPECT_EQ(invert_pixels(img), (std::vector<double>{1.0, 0.75, 0.0, 0.5}));
  EXPECT_EQ(invert_pixels(invert_pixels(img)), img);
}

TEST(Transforms, ParseAndNames) {
  for (const char* name : {"identity", "rot90", "rot180", "rot270", "invert"})
    EXPECT_EQ(Transform::parse(name).name(), name);
  EXPECT_THROW(Transform::parse("rot45"), InvalidConfig);
  const auto t = Transform::parse("rot180");
  EXPECT_EQ(apply_transform(t, std::vector<double>{1, 2, 3, 4}), (std::vector<double>{4, 3, 2, 1}));
  EXPECT_THROW(apply_transform(t, std::vector<double>{1, 2, 3}), InvalidConfig);
}

Table tiny_table(std::size_t rows) {
  Table t;
  t.dim = 4;
  for (std::size_t r = 0; r < rows; ++r) {
    for (int k = 0; k < 4; ++k) t.features.push_back(static_cast<double>((r * 4 + k) % 7) / 7.0);
    t.labels.push_back(static_cast<int>(r % 3));
  }
  return t;
}

TEST(Transforms, RoundRobinSplits) {
  std::vector<Transform> ts;
  for (const char* n : {"identity", "rot90", "rot180", "rot270"}) ts.push_back(Transform::parse(n));
  const auto fd = make_transform_splits(tiny_table(40), ts, 8, 5, 1);
  ASSERT_EQ(fd.num_clients(), 8u);
  EXPECT_EQ(fd.ground_truth->sizes(), (std::vector<std::size_t>{2, 2, 2, 2}));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(fd.ground_truth->cluster_of(i), static_cast<int>(i % 4));
  EXPECT_EQ(fd.kind, ModelKind::logistic(4, 3));
  EXPECT_EQ(make_transform_splits(tiny_table(40), ts, 8, 5, 1), fd);
  EXPECT_THROW(make_transform_splits(tiny_table(39), ts, 8, 5, 1), InvalidConfig);
  auto odd = tiny_table(40);
  odd.dim = 2;
  odd.features.resize(80);
  EXPECT_THROW(make_transform_splits(odd, ts, 8, 5, 1), InvalidConfig);
}

TEST(Transforms, ShardsAreDisjoint) {
  const auto fd = make_transform_splits(tiny_table(40), {Transform::parse("identity")}, 8, 5, 2);
  // Identity keeps rows, so every base row appears exactly once.
  std::multiset<std::vector<double>> seen;
  for (const auto& c : fd.clients)
    for (std::size_t r = 0; r < c.size(); ++r) {
      auto row = c.view(Split::All).row(r);
      seen.insert(std::vector<double>(row.begin(), row.end()));
    }
  std::multiset<std::vector<double>> base;
  const auto t = tiny_table(40);
  for (std::size_t r = 0; r < 40; ++r) base.insert(std::vector<double>(t.features.begin() + r * 4, t.features.begin() + r * 4 + 4));
  EXPECT_EQ(seen, base);
}

TEST(Persistence, RoundTrip) {
  const auto dir = scratch_dir("roundtrip");
  const auto fd = gen_mixture_linreg(small_spec());
  save_federated_csv(fd, dir);
  const auto back = load_federated_csv(dir);
  ASSERT_EQ(back.num_clients(), fd.num_clients());
  EXPECT_EQ(back.kind, fd.kind);
  EXPECT_EQ(back.ground_truth, fd.ground_truth);
  for (std::size_t i = 0; i < fd.num_clients(); ++i) {
    ASSERT_EQ(back.clients[i].features.size(), fd.clients[i].features.size());
    for (std::size_t k = 0; k < fd.clients[i].features.size(); ++k)
      EXPECT_NEAR(back.clients[i].features[k], fd.clients[i].features[k], 1e-12);
    for (std::size_t k = 0; k < fd.clients[i].size(); ++k)
      EXPECT_NEAR(back.clients[i].targets[k], fd.clients[i].targets[k], 1e-12);
    EXPECT_EQ(back.clients[i].train_count, fd.clients[i].train_count);
  }
  // 17 significant digits reproduce doubles exactly.
  EXPECT_EQ(back, fd);
  fs::remove_all(dir);
}

TEST(Persistence, MissingGroundTruthIsOptional) {
  const auto dir = scratch_dir("nogt");
  save_federated_csv(gen_mixture_linreg(small_spec()), dir);
  fs::remove(dir / "ground_truth.csv");
  const auto back = load_federated_csv(dir);
  EXPECT_FALSE(back.ground_truth);
  fs::remove_all(dir);
}

TEST(Persistence, WidthMismatchNamesFileAndLine) {
  const auto dir = scratch_dir("width");
  save_federated_csv(gen_mixture_linreg(small_spec()), dir);
  {
    std::ofstream f(dir / "client_2.csv", std::ios::app);
    f << "1,2,3\n";
  }
  try {
    load_federated_csv(dir);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("client_2.csv:11"), std::string::npos) << msg;
  }
  fs::remove_all(dir);
}

TEST(Persistence, MalformedNumber) {
  const auto dir = scratch_dir("malformed");
  save_federated_csv(gen_mixture_linreg(small_spec()), dir);
  {
    std::ofstream f(dir / "client_0.csv", std::ios::app);
    f << "1,abc,3,4,5\n";
  }
  EXPECT_THROW(load_federated_csv(dir), FormatError);
  EXPECT_THROW(load_federated_csv(dir / "nope"), Error);
  fs::remove_all(dir);
}

TEST(Persistence, TableCsv) {
  const auto dir = scratch_dir("table");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "t.csv");
    f << "0,0.5,1,0.25,2\n1,1,0,0,0\n";
  }
  const auto t = load_table_csv(dir / "t.csv");
  EXPECT_EQ(t.dim, 4u);
  EXPECT_EQ(t.labels, (std::vector<int>{2, 0}));
  {
    std::ofstream f(dir / "bad.csv");
    f << "0,0.5,1,0.25,2\n1,1,0\n";
  }
  EXPECT_THROW(load_table_csv(dir / "bad.csv"), FormatError);
  fs::remove_all(dir);
}

// KL(N(<x,wi>, s^2) || N(<x,wj>, s^2)) averaged over generator features is
// |wi - wj|^2 / (2 s^2): the feature covariance is the identity.
TEST(Generator, ExpectedKlBetweenClusterConditionals) {
  SyntheticSpec s;
  s.m = 1;
  s.n = 200000;
  s.d = 5;
  s.clusters = 1;
  s.sigma = 0.7;
  s.seed = 31;
  const auto fd = gen_mixture_linreg(s);
  const ParamVector wi{0.3, -0.2, 0.5, 0.1, 0.0}, wj{-0.1, 0.4, 0.2, 0.1, 0.3};
  ParamVector delta(5);
  for (std::size_t k = 0; k < 5; ++k) delta[k] = wi[k] - wj[k];
  const double diff2 = l2(wi, wj) * l2(wi, wj);

  const auto& x = fd.clients[0].features;
  double kl = 0.0;
  for (std::size_t r = 0; r < s.n; ++r) {
    double m = 0.0;
    for (std::size_t k = 0; k < 5; ++k) m += x[r * 5 + k] * delta[k];
    kl += m * m / (2 * s.sigma * s.sigma);
  }
  kl /= static_cast<double>(s.n);
  EXPECT_NEAR(kl, diff2 / (2 * s.sigma * s.sigma), 0.02 * diff2 / (2 * s.sigma * s.sigma));

  // Same quantity through the squared loss on zero targets.
  auto zero = fd.clients[0];
  std::fill(zero.targets.begin(), zero.targets.end(), 0.0);
  EXPECT_NEAR(loss(ModelKind::linear(5), delta, zero.view(Split::All)) / (s.sigma * s.sigma), kl, 1e-9 * kl);
}

}  // namespace
}  // namespace fedclust
