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

#include "fedclust/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "fedclust/error.hpp"
#include "fedclust/kernels.hpp"
#include "fedclust/rng.hpp"
#include "json.hpp"

namespace fedclust {

void SyntheticSpec::validate() const {
  if (m < 1 || n < 1 || d < 1 || clusters < 1) throw InvalidConfig("synthetic spec: m, n, d and C must be >= 1");
  if (m % clusters != 0)
    throw InvalidConfig("synthetic spec: m = " + std::to_string(m) + " cannot be divided equally into " +
                        std::to_string(clusters) + " clusters");
  if (!(sigma >= 0.0)) throw InvalidConfig("synthetic spec: sigma must be >= 0");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw InvalidConfig("synthetic spec: train fraction must be in (0, 1]");
}

void FederatedDataset::validate() const {
  if (clients.empty()) throw InvalidConfig("federated dataset has no clients");
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const auto& c = clients[i];
    if (c.client_id != static_cast<int>(i))
      throw InvalidConfig("client ids must be contiguous 0..m-1 (position " + std::to_string(i) + " has id " +
                          std::to_string(c.client_id) + ")");
    if (c.dim != kind.features) throw DimensionMismatch("client " + std::to_string(i) + " features", kind.features, c.dim);
    if (c.size() < 1) throw EmptyData("client " + std::to_string(i) + " has no samples");
    if (c.features.size() != c.size() * c.dim || c.train_count > c.size())
      throw InvalidConfig("client " + std::to_string(i) + " has inconsistent storage");
    for (double v : c.features)
      if (!std::isfinite(v)) throw InvalidConfig("client " + std::to_string(i) + " has non-finite features");
  }
  if (ground_truth && ground_truth->num_clients() != clients.size())
    throw InvalidConfig("ground truth covers " + std::to_string(ground_truth->num_clients()) + " of " +
                        std::to_string(clients.size()) + " clients");
  if (ground_truth && !ground_truth->unassigned().empty())
    throw InvalidConfig("ground truth must assign every client");
}

namespace {

std::size_t cluster_of_client(const SyntheticSpec& spec, std::size_t i) { return i / (spec.m / spec.clusters); }

std::vector<ParamVector> draw_cluster_models(const SyntheticSpec& spec) {
  std::vector<ParamVector> models;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    Rng rng = make_rng(spec.seed, c, StreamTag::ClusterModels);
    std::bernoulli_distribution coin(0.5);
    ParamVector w(spec.d);
    for (std::size_t k = 0; k < spec.d; ++k) w[k] = coin(rng) ? 1.0 : 0.0;
    models.push_back(std::move(w));
  }
  return models;
}

ClientDataset draw_client(const SyntheticSpec& spec, const ParamVector& model, std::size_t i,
                          std::uint64_t round) {
  ClientDataset c;
  c.client_id = static_cast<int>(i);
  c.dim = spec.d;
  c.features.resize(spec.n * spec.d);
  c.targets.resize(spec.n);
  c.train_count = train_count_for(spec.n, spec.train_fraction);
  Rng feat = make_rng(spec.seed, i, StreamTag::Features, round);
  Rng noise = make_rng(spec.seed, i, StreamTag::Noise, round);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : c.features) v = gauss(feat);
  std::normal_distribution<double> eps(0.0, 1.0);
  for (std::size_t r = 0; r < spec.n; ++r) {
    const double e = spec.sigma > 0.0 ? spec.sigma * eps(noise) : 0.0;
    c.targets[r] = simd::dot(c.view(Split::All).row(r), model.values()) + e;
  }
  return c;
}

FederatedDataset draw_federation(const SyntheticOrigin& origin) {
  const auto& spec = origin.spec;
  FederatedDataset fd;
  fd.kind = ModelKind::linear(spec.d);
  std::vector<int> truth(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    const std::size_t c = cluster_of_client(spec, i);
    truth[i] = static_cast<int>(c);
    fd.clients.push_back(draw_client(spec, origin.cluster_models[c], i, origin.round));
  }
  fd.ground_truth = Clustering(truth);
  fd.origin = origin;
  return fd;
}

}  // namespace

FederatedDataset gen_mixture_linreg(const SyntheticSpec& spec) {
  spec.validate();
  return draw_federation(SyntheticOrigin{spec, draw_cluster_models(spec), 0});
}

FederatedDataset resample_clients(const FederatedDataset& fd, std::uint64_t round) {
  if (!fd.origin) throw NotSynthetic("resampling needs a synthetic federation with a known distribution");
  SyntheticOrigin origin = *fd.origin;
  origin.round = round;
  return draw_federation(origin);
}

// ---------------------------------------------------------------------------
// Transform splits

Transform Transform::parse(const std::string& name) {
  if (name == "identity") return {Kind::Identity, 0};
  if (name == "rot90") return {Kind::Rotate, 1};
  if (name == "rot180") return {Kind::Rotate, 2};
  if (name == "rot270") return {Kind::Rotate, 3};
  if (name == "invert") return {Kind::Invert, 0};
  throw InvalidConfig("unknown transform '" + name + "'");
}

std::string Transform::name() const {
  switch (kind) {
    case Kind::Identity: return "identity";
    case Kind::Invert: return "invert";
    case Kind::Rotate: return "rot" + std::to_string(90 * quarter_turns);
  }
  return "?";
}

std::vector<double> rotate90(std::span<const double> image, std::size_t side) {
  if (side * side != image.size()) throw InvalidConfig("rotation needs a square image");
  std::vector<double> out(image.size());
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) out[r * side + c] = image[(side - 1 - c) * side + r];
  return out;
}

std::vector<double> invert_pixels(std::span<const double> image) {
  std::vector<double> out(image.size());
  std::transform(image.begin(), image.end(), out.begin(), [](double x) { return 1.0 - x; });
  return out;
}

namespace {

std::size_t square_side(std::size_t len) {
  auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(len))));
  if (s * s != len)
    throw InvalidConfig("feature length " + std::to_string(len) + " is not a perfect square; cannot rotate");
  return s;
}

}  // namespace

std::vector<double> apply_transform(const Transform& t, std::span<const double> image) {
  switch (t.kind) {
    case Transform::Kind::Identity: return {image.begin(), image.end()};
    case Transform::Kind::Invert: return invert_pixels(image);
    case Transform::Kind::Rotate: {
      const std::size_t side = square_side(image.size());
      std::vector<double> out(image.begin(), image.end());
      for (int k = 0; k < ((t.quarter_turns % 4) + 4) % 4; ++k) out = rotate90(out, side);
      return out;
    }
  }
  return {image.begin(), image.end()};
}

FederatedDataset make_transform_splits(const Table& base, const std::vector<Transform>& transforms,
                                       std::size_t m, std::size_t n, std::uint64_t seed,
                                       double train_fraction) {
  if (transforms.empty()) throw InvalidConfig("at least one transform is required");
  if (m < 1 || n < 1) throw InvalidConfig("m and n must be >= 1");
  if (base.rows() < m * n)
    throw InvalidConfig("base table has " + std::to_string(base.rows()) + " rows, need m*n = " +
                        std::to_string(m * n));
  for (const auto& t : transforms)
    if (t.kind == Transform::Kind::Rotate) square_side(base.dim);

  std::vector<std::size_t> order(base.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng(seed, 0, StreamTag::Shards);
  std::shuffle(order.begin(), order.end(), rng);

  int max_label = 0;
  for (int l : base.labels) {
    if (l < 0) throw InvalidConfig("negative class label in base table");
    max_label = std::max(max_label, l);
  }

  FederatedDataset fd;
  fd.kind = ModelKind::logistic(base.dim, static_cast<std::size_t>(max_label) + 1);
  std::vector<int> truth(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t t = i % transforms.size();
    truth[i] = static_cast<int>(t);
    ClientDataset c;
    c.client_id = static_cast<int>(i);
    c.dim = base.dim;
    c.train_count = train_count_for(n, train_fraction);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = order[i * n + j];
      const std::span<const double> img(base.features.data() + row * base.dim, base.dim);
      const auto out = apply_transform(transforms[t], img);
      c.features.insert(c.features.end(), out.begin(), out.end());
      c.targets.push_back(static_cast<double>(base.labels[row]));
    }
    fd.clients.push_back(std::move(c));
  }
  fd.ground_truth = Clustering(truth);
  return fd;
}

Table load_table_csv(const std::filesystem::path& path) {
  auto in = csv::open_in(path);
  Table t;
  std::string line;
  std::vector<double> vals;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (!csv::parse_doubles(line, vals)) throw FormatError(path.string(), lineno, "malformed row");
    if (vals.size() < 2) throw FormatError(path.string(), lineno, "row needs features and a label");
    if (t.rows() == 0) t.dim = vals.size() - 1;
    if (vals.size() - 1 != t.dim)
      throw FormatError(path.string(), lineno,
                        "expected " + std::to_string(t.dim + 1) + " columns, got " + std::to_string(vals.size()));
    const double label = vals.back();
    if (label != std::floor(label) || label < 0) throw FormatError(path.string(), lineno, "label must be a class index");
    t.features.insert(t.features.end(), vals.begin(), vals.end() - 1);
    t.labels.push_back(static_cast<int>(label));
  }
  if (t.rows() == 0) throw FormatError(path.string(), "table is empty");
  return t;
}

// ---------------------------------------------------------------------------
// Directory format

namespace {

using nlohmann::ordered_json;

std::string client_file(std::size_t i) { return "client_" + std::to_string(i) + ".csv"; }

ordered_json spec_to_json(const SyntheticSpec& s) {
  return ordered_json{{"m", s.m},         {"n", s.n},
                      {"d", s.d},         {"clusters", s.clusters},
                      {"sigma", s.sigma}, {"train_fraction", s.train_fraction},
                      {"seed", s.seed}};
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.m = j.at("m");
  s.n = j.at("n");
  s.d = j.at("d");
  s.clusters = j.at("clusters");
  s.sigma = j.at("sigma");
  s.train_fraction = j.at("train_fraction");
  s.seed = j.at("seed");
  return s;
}

}  // namespace

void save_federated_csv(const FederatedDataset& fd, const std::filesystem::path& dir) {
  fd.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  ordered_json meta;
  meta["m"] = fd.num_clients();
  meta["d"] = fd.kind.features;
  meta["model_kind"] = fd.kind.is_classifier() ? "logistic" : "linear";
  meta["K"] = fd.kind.classes;
  meta["ground_truth"] = fd.ground_truth.has_value();
  ordered_json counts = ordered_json::array();
  for (const auto& c : fd.clients) counts.push_back(c.train_count);
  meta["train_counts"] = counts;
  if (fd.origin) {
    ordered_json syn;
    syn["spec"] = spec_to_json(fd.origin->spec);
    syn["round"] = fd.origin->round;
    ordered_json models = ordered_json::array();
    for (const auto& w : fd.origin->cluster_models) models.push_back(w.vec());
    syn["cluster_models"] = models;
    meta["synthetic"] = syn;
  }
  {
    auto out = csv::open_out(dir / "meta.json");
    out << meta.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + (dir / "meta.json").string());
  }
  for (const auto& c : fd.clients) {
    const auto path = dir / client_file(static_cast<std::size_t>(c.client_id));
    auto out = csv::open_out(path);
    std::string line;
    for (std::size_t r = 0; r < c.size(); ++r) {
      line.clear();
      for (std::size_t k = 0; k < c.dim; ++k) {
        line += csv::format_double(c.features[r * c.dim + k]);
        line += ',';
      }
      line += csv::format_double(c.targets[r]);
      line += '\n';
      out << line;
    }
    if (!out) throw IoError("failed writing " + path.string());
  }
  if (fd.ground_truth) write_clustering_csv(dir / "ground_truth.csv", *fd.ground_truth);
}

FederatedDataset load_federated_csv(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  nlohmann::json meta;
  {
    auto in = csv::open_in(meta_path);
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(meta_path.string(), e.what());
    }
  }
  FederatedDataset fd;
  std::size_t m = 0, d = 0;
  std::vector<std::size_t> train_counts;
  try {
    m = meta.at("m");
    d = meta.at("d");
    const std::string kind = meta.at("model_kind");
    if (kind == "linear") {
      fd.kind = ModelKind::linear(d);
    } else if (kind == "logistic") {
      fd.kind = ModelKind::logistic(d, meta.at("K").get<std::size_t>());
    } else {
      throw FormatError(meta_path.string(), "unknown model_kind '" + kind + "'");
    }
    if (meta.contains("train_counts")) train_counts = meta["train_counts"].get<std::vector<std::size_t>>();
    if (meta.contains("synthetic")) {
      const auto& syn = meta["synthetic"];
      SyntheticOrigin origin;
      origin.spec = spec_from_json(syn.at("spec"));
      origin.round = syn.at("round");
      for (const auto& w : syn.at("cluster_models")) origin.cluster_models.emplace_back(w.get<std::vector<double>>());
      fd.origin = std::move(origin);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(meta_path.string(), e.what());
  }
  if (!train_counts.empty() && train_counts.size() != m)
    throw FormatError(meta_path.string(), "train_counts has " + std::to_string(train_counts.size()) + " entries for m = " +
                                              std::to_string(m));

  std::vector<double> vals;
  for (std::size_t i = 0; i < m; ++i) {
    const auto path = dir / client_file(i);
    auto in = csv::open_in(path);
    ClientDataset c;
    c.client_id = static_cast<int>(i);
    c.dim = d;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line == "\r") continue;
      if (!csv::parse_doubles(line, vals)) throw FormatError(path.string(), lineno, "malformed row");
      if (vals.size() != d + 1)
        throw FormatError(path.string(), lineno,
                          "expected " + std::to_string(d + 1) + " columns, got " + std::to_string(vals.size()));
      c.features.insert(c.features.end(), vals.begin(), vals.end() - 1);
      c.targets.push_back(vals.back());
    }
    if (c.size() == 0) throw FormatError(path.string(), "client file has no rows");
    c.train_count = train_counts.empty() ? train_count_for(c.size(), 0.8) : train_counts[i];
    if (c.train_count > c.size()) throw FormatError(meta_path.string(), "train count exceeds rows for client " + std::to_string(i));
    fd.clients.push_back(std::move(c));
  }
  const auto truth_path = dir / "ground_truth.csv";
  if (std::filesystem::exists(truth_path)) fd.ground_truth = read_clustering_csv(truth_path);
  fd.validate();
  return fd;
}

}  // namespace fedclust
