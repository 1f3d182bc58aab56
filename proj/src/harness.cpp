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

#include "fedclust/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "fedclust/error.hpp"
#include "fedclust/rng.hpp"

namespace fedclust {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Srfca: return "srfca";
    case Algorithm::Ifca: return "ifca";
    case Algorithm::Local: return "local";
    case Algorithm::Global: return "global";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "srfca" || s == "sr-fca") return Algorithm::Srfca;
  if (s == "ifca") return Algorithm::Ifca;
  if (s == "local") return Algorithm::Local;
  if (s == "global") return Algorithm::Global;
  throw InvalidConfig("unknown algorithm '" + s + "'");
}

std::vector<Algorithm> parse_algorithm_list(const std::string& csv) {
  std::vector<Algorithm> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_algorithm(item));
  return out;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  throw InvalidConfig("unknown report format '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw InvalidConfig("at least one seed is required");
  if (algorithms.empty()) throw InvalidConfig("at least one algorithm must be selected");
  std::set<Algorithm> uniq(algorithms.begin(), algorithms.end());
  if (uniq.size() != algorithms.size()) throw InvalidConfig("algorithm list has duplicates");
  train.validate();
  srfca.validate();
  ifca.validate();
  for (double l : lambda_grid)
    if (!(l >= 0.0)) throw InvalidConfig("lambda grid values must be >= 0");
  switch (dataset.type) {
    case DatasetSpec::Type::Synthetic: dataset.synthetic.validate(); break;
    case DatasetSpec::Type::Path:
      if (dataset.path.empty()) throw InvalidConfig("dataset path is empty");
      break;
    case DatasetSpec::Type::Transform:
      if (dataset.path.empty() || dataset.transforms.empty() || dataset.m < 1 || dataset.n < 1)
        throw InvalidConfig("transform dataset needs path, transforms, m and n");
      break;
  }
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidConfig(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw InvalidConfig("unknown key '" + k + "' in " + where);
}

template <typename T>
void read_opt(const json& obj, const char* key, T& dst) {
  if (obj.contains(key) && !obj[key].is_null()) dst = obj[key].get<T>();
}

std::vector<double> grid_from_json(const json& g) {
  if (g.is_string()) return parse_lambda_grid(g.get<std::string>());
  return g.get<std::vector<double>>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    check_keys(j, {"dataset", "algorithms", "train", "srfca", "ifca", "seeds", "output_dir", "format",
                   "participation_fraction"},
               "config");
    if (j.contains("dataset")) {
      const json& d = j["dataset"];
      const std::string type = d.value("type", "synthetic");
      if (type == "synthetic") {
        check_keys(d, {"type", "m", "n", "d", "clusters", "sigma", "train_fraction"}, "dataset");
        auto& s = cfg.dataset.synthetic;
        read_opt(d, "m", s.m);
        read_opt(d, "n", s.n);
        read_opt(d, "d", s.d);
        read_opt(d, "clusters", s.clusters);
        read_opt(d, "sigma", s.sigma);
        read_opt(d, "train_fraction", s.train_fraction);
      } else if (type == "path") {
        check_keys(d, {"type", "path"}, "dataset");
        cfg.dataset.type = DatasetSpec::Type::Path;
        cfg.dataset.path = d.at("path").get<std::string>();
      } else if (type == "transform") {
        check_keys(d, {"type", "path", "transforms", "m", "n", "train_fraction"}, "dataset");
        cfg.dataset.type = DatasetSpec::Type::Transform;
        cfg.dataset.path = d.at("path").get<std::string>();
        for (const auto& t : d.at("transforms")) cfg.dataset.transforms.push_back(Transform::parse(t.get<std::string>()));
        cfg.dataset.m = d.at("m");
        cfg.dataset.n = d.at("n");
        read_opt(d, "train_fraction", cfg.dataset.train_fraction);
      } else {
        throw InvalidConfig("unknown dataset type '" + type + "'");
      }
    }
    if (j.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : j["algorithms"]) cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      check_keys(t, {"steps", "learning_rate", "local_steps", "trim_level", "projection_diameter", "batch_size"}, "train");
      read_opt(t, "steps", cfg.train.steps);
      read_opt(t, "learning_rate", cfg.train.learning_rate);
      read_opt(t, "local_steps", cfg.train.local_steps);
      read_opt(t, "trim_level", cfg.train.trim_level);
      read_opt(t, "batch_size", cfg.train.batch_size);
      if (t.contains("projection_diameter") && !t["projection_diameter"].is_null())
        cfg.train.projection_diameter = t["projection_diameter"].get<double>();
    }
    double participation = 1.0;
    read_opt(j, "participation_fraction", participation);
    cfg.srfca.participation_fraction = participation;
    cfg.ifca.participation_fraction = participation;
    if (j.contains("srfca")) {
      const json& s = j["srfca"];
      check_keys(s, {"lambda", "lambda_grid", "min_cluster_size", "refine_rounds", "metric", "distance_split",
                     "resample_per_refine", "participation_fraction", "final_fit"},
                 "srfca");
      if (s.contains("lambda") && !s["lambda"].is_null()) cfg.srfca.lambda = s["lambda"].get<double>();
      if (s.contains("lambda_grid") && !s["lambda_grid"].is_null()) cfg.lambda_grid = grid_from_json(s["lambda_grid"]);
      read_opt(s, "min_cluster_size", cfg.srfca.min_cluster_size);
      read_opt(s, "refine_rounds", cfg.srfca.refine_rounds);
      if (s.contains("metric")) cfg.srfca.metric = parse_distance_kind(s["metric"].get<std::string>());
      if (s.contains("distance_split")) {
        const std::string sp = s["distance_split"];
        if (sp == "train") cfg.srfca.distance_split = Split::Train;
        else if (sp == "test") cfg.srfca.distance_split = Split::Test;
        else throw InvalidConfig("distance_split must be 'train' or 'test'");
      }
      read_opt(s, "resample_per_refine", cfg.srfca.resample_per_refine);
      read_opt(s, "participation_fraction", cfg.srfca.participation_fraction);
      read_opt(s, "final_fit", cfg.final_fit);
    }
    if (j.contains("ifca")) {
      const json& f = j["ifca"];
      check_keys(f, {"clusters", "rounds", "participation_fraction", "init_low", "init_high"}, "ifca");
      read_opt(f, "clusters", cfg.ifca.clusters);
      read_opt(f, "rounds", cfg.ifca.rounds);
      read_opt(f, "participation_fraction", cfg.ifca.participation_fraction);
      read_opt(f, "init_low", cfg.ifca.init_low);
      read_opt(f, "init_high", cfg.ifca.init_high);
    }
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("output_dir") && !j["output_dir"].is_null()) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("format")) cfg.format = parse_report_format(j["format"].get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  cfg.srfca.train = cfg.train;
  cfg.ifca.train = cfg.train;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = csv::open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

FederatedDataset materialize_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  switch (spec.type) {
    case DatasetSpec::Type::Synthetic: {
      SyntheticSpec s = spec.synthetic;
      s.seed = seed;
      return gen_mixture_linreg(s);
    }
    case DatasetSpec::Type::Path: return load_federated_csv(spec.path);
    case DatasetSpec::Type::Transform:
      return make_transform_splits(load_table_csv(spec.path), spec.transforms, spec.m, spec.n, seed,
                                   spec.train_fraction);
  }
  throw InvalidConfig("unknown dataset type");
}

// ---------------------------------------------------------------------------
// Statistics

bool ExperimentReport::any_failed() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return !c.ok; });
}

Stat mean_std(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mu = sum / static_cast<double>(values.size());
  s.mean = mu;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<AlgorithmSummary> summarize(const std::vector<CellResult>& cells, const std::vector<Algorithm>& algorithms) {
  std::vector<AlgorithmSummary> out;
  for (Algorithm a : algorithms) {
    AlgorithmSummary s;
    s.algorithm = a;
    std::vector<double> loss, acc, mis;
    for (const auto& c : cells) {
      if (c.algorithm != a || !c.ok) continue;
      ++s.cells_ok;
      loss.push_back(c.test_loss);
      if (c.test_accuracy) acc.push_back(*c.test_accuracy);
      if (c.misclustering) mis.push_back(*c.misclustering);
    }
    s.test_loss = mean_std(loss);
    s.test_accuracy = mean_std(acc);
    s.misclustering = mean_std(mis);
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Running

namespace {

void score_clustering(CellResult& cell, const FederatedDataset& fd, const Clustering& c) {
  cell.clusters = c.num_clusters();
  if (!fd.ground_truth) return;
  const Misclustering mc = misclustering(c, *fd.ground_truth);
  cell.misclustering = mc.error_fraction;
  cell.exact_match = mc.exact_match;
}

void fill_eval(CellResult& cell, const EvalSummary& e) {
  cell.test_loss = e.mean_test_loss;
  cell.test_accuracy = e.mean_test_accuracy;
}

void run_srfca(CellResult& cell, const FederatedDataset& fd, const ExperimentConfig& cfg, std::uint64_t seed) {
  SrfcaConfig sc = cfg.srfca;
  sc.seed = seed;
  if (!sc.lambda && !cfg.lambda_grid.empty()) sc.lambda = tune_lambda(fd, cfg.lambda_grid, sc).lambda;
  SrfcaResult r = sr_fca(fd, sc);
  if (cfg.final_fit) r.state.cluster_models = fit_cluster_models(fd, r.state.clustering, sc, sc.refine_rounds + 1);
  cell.lambda = r.state.lambda;
  const auto e = evaluate_clients(fd, [&](std::size_t i) -> const ParamVector& {
    return model_for_client(r.state, fd, sc, i);
  });
  fill_eval(cell, e);
  score_clustering(cell, fd, r.state.clustering);
  if (!cfg.output_dir.empty())
    write_round_trace(r, cfg.output_dir / ("seed_" + std::to_string(seed)) / "srfca");
}

void run_ifca(CellResult& cell, const FederatedDataset& fd, const ExperimentConfig& cfg, std::uint64_t seed) {
  IfcaConfig ic = cfg.ifca;
  ic.seed = seed;
  const IfcaResult r = ifca(fd, ic);
  fill_eval(cell, r.eval);
  score_clustering(cell, fd, r.clustering);
}

void run_local(CellResult& cell, const FederatedDataset& fd, const ExperimentConfig& cfg) {
  const LocalResult r = train_local(fd, cfg.train);
  fill_eval(cell, r.eval);
  score_clustering(cell, fd, Clustering::singletons(fd.num_clients()));
}

void run_global(CellResult& cell, const FederatedDataset& fd, const ExperimentConfig& cfg, std::uint64_t seed) {
  IfcaConfig ic = cfg.ifca;
  ic.seed = seed;
  const GlobalResult r = fedavg_global(fd, cfg.train, ifca_participation(ic));
  fill_eval(cell, r.eval);
  score_clustering(cell, fd, Clustering::single(fd.num_clients()));
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  for (std::uint64_t seed : cfg.seeds) {
    std::optional<FederatedDataset> fd;
    std::string data_error;
    try {
      fd = materialize_dataset(cfg.dataset, seed);
    } catch (const std::exception& e) {
      data_error = std::string("dataset: ") + e.what();
    }
    for (Algorithm a : cfg.algorithms) {
      CellResult cell;
      cell.algorithm = a;
      cell.seed = seed;
      const auto start = std::chrono::steady_clock::now();
      if (!fd) {
        cell.error = data_error;
      } else {
        try {
          switch (a) {
            case Algorithm::Srfca: run_srfca(cell, *fd, cfg, seed); break;
            case Algorithm::Ifca: run_ifca(cell, *fd, cfg, seed); break;
            case Algorithm::Local: run_local(cell, *fd, cfg); break;
            case Algorithm::Global: run_global(cell, *fd, cfg, seed); break;
          }
          cell.ok = true;
        } catch (const std::exception& e) {
          cell = CellResult{};
          cell.algorithm = a;
          cell.seed = seed;
          cell.error = e.what();
        }
      }
      cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      report.cells.push_back(std::move(cell));
    }
  }
  report.summary = summarize(report.cells, cfg.algorithms);
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json stat_json(const Stat& s) {
  return ordered_json{{"mean", opt_json(s.mean)}, {"std", opt_json(s.std)}};
}

std::optional<double> opt_double(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

Stat stat_from(const json& j) { return Stat{opt_double(j, "mean"), opt_double(j, "std")}; }

}  // namespace

ordered_json report_to_json(const ExperimentReport& r) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : r.cells) {
    ordered_json o;
    o["algorithm"] = to_string(c.algorithm);
    o["seed"] = c.seed;
    o["status"] = c.ok ? "ok" : "failed";
    if (c.ok) {
      o["test_loss"] = c.test_loss;
      o["test_accuracy"] = opt_json(c.test_accuracy);
      if (c.misclustering) {
        o["misclustering"] = *c.misclustering;
        o["exact_match"] = *c.exact_match;
      }
      o["clusters"] = c.clusters;
      if (c.lambda) o["lambda"] = *c.lambda;
    } else {
      o["error"] = c.error;
    }
    cells.push_back(o);
  }
  ordered_json summary = ordered_json::array();
  for (const auto& s : r.summary) {
    ordered_json o;
    o["algorithm"] = to_string(s.algorithm);
    o["cells_ok"] = s.cells_ok;
    o["test_loss"] = stat_json(s.test_loss);
    o["test_accuracy"] = stat_json(s.test_accuracy);
    o["misclustering"] = stat_json(s.misclustering);
    summary.push_back(o);
  }
  return ordered_json{{"cells", cells}, {"summary", summary}};
}

ExperimentReport report_from_json(const json& j) {
  ExperimentReport r;
  try {
    for (const auto& o : j.at("cells")) {
      CellResult c;
      c.algorithm = parse_algorithm(o.at("algorithm").get<std::string>());
      c.seed = o.at("seed");
      c.ok = o.at("status").get<std::string>() == "ok";
      if (c.ok) {
        c.test_loss = o.at("test_loss");
        c.test_accuracy = opt_double(o, "test_accuracy");
        c.misclustering = opt_double(o, "misclustering");
        if (o.contains("exact_match")) c.exact_match = o["exact_match"].get<bool>();
        c.clusters = o.at("clusters");
        c.lambda = opt_double(o, "lambda");
      } else {
        c.error = o.at("error");
      }
      r.cells.push_back(c);
    }
    for (const auto& o : j.at("summary")) {
      AlgorithmSummary s;
      s.algorithm = parse_algorithm(o.at("algorithm").get<std::string>());
      s.cells_ok = o.at("cells_ok");
      s.test_loss = stat_from(o.at("test_loss"));
      s.test_accuracy = stat_from(o.at("test_accuracy"));
      s.misclustering = stat_from(o.at("misclustering"));
      r.summary.push_back(s);
    }
  } catch (const json::exception& e) {
    throw FormatError("report", e.what());
  }
  return r;
}

std::string report_to_csv(const ExperimentReport& r) {
  auto num = [](const std::optional<double>& v) { return v ? csv::format_fixed(*v, 6) : std::string(); };
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  std::ostringstream out;
  out << "algorithm,seed,status,test_loss,test_accuracy,misclustering,exact_match,clusters,lambda,error\n";
  for (const auto& c : r.cells) {
    out << to_string(c.algorithm) << ',' << c.seed << ',' << (c.ok ? "ok" : "failed") << ',';
    if (c.ok) {
      out << csv::format_fixed(c.test_loss, 6) << ',' << num(c.test_accuracy) << ',' << num(c.misclustering) << ','
          << (c.exact_match ? (*c.exact_match ? "true" : "false") : "") << ',' << c.clusters << ',' << num(c.lambda)
          << ",\n";
    } else {
      out << ",,,,,," << quote(c.error) << '\n';
    }
  }
  for (const auto& s : r.summary) {
    out << to_string(s.algorithm) << ",mean,summary," << num(s.test_loss.mean) << ',' << num(s.test_accuracy.mean)
        << ',' << num(s.misclustering.mean) << ",,,,\n";
    out << to_string(s.algorithm) << ",std,summary," << num(s.test_loss.std) << ',' << num(s.test_accuracy.std)
        << ',' << num(s.misclustering.std) << ",,,,\n";
  }
  return out.str();
}

void emit_report(const ExperimentReport& r, ReportFormat format, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  auto out = csv::open_out(path);
  if (format == ReportFormat::Json)
    out << report_to_json(r).dump(2) << '\n';
  else
    out << report_to_csv(r);
  if (!out) throw IoError("failed writing " + path.string());
}

void emit_timings(const ExperimentReport& r, const std::filesystem::path& path) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : r.cells)
    cells.push_back(ordered_json{{"algorithm", to_string(c.algorithm)}, {"seed", c.seed}, {"wall_seconds", c.wall_seconds}});
  auto out = csv::open_out(path);
  out << ordered_json{{"nondeterministic_wall_clock", cells}}.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void write_round_trace(const SrfcaResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  ordered_json rounds = ordered_json::array();
  for (std::size_t r = 0; r < result.trace.size(); ++r) {
    const auto& c = result.trace[r];
    write_clustering_csv(dir / ("round_" + std::to_string(r) + ".csv"), c);
    rounds.push_back(ordered_json{{"round", r},
                                  {"clusters", c.num_clusters()},
                                  {"sizes", c.sizes()},
                                  {"unassigned", c.unassigned().size()}});
  }
  auto out = csv::open_out(dir / "trace.json");
  out << ordered_json{{"lambda", result.state.lambda}, {"rounds", rounds}}.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + (dir / "trace.json").string());
}

// ---------------------------------------------------------------------------
// Lambda tuning

std::vector<double> parse_lambda_grid(const std::string& s) {
  std::vector<double> out;
  auto to_d = [&](const std::string& t) {
    std::vector<double> v;
    if (!csv::parse_doubles(t, v) || v.size() != 1) throw InvalidConfig("bad lambda grid value '" + t + "' in '" + s + "'");
    return v[0];
  };
  if (s.find(':') == std::string::npos) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(to_d(item));
  } else {
    const auto a = s.find(':'), b = s.find(':', a + 1);
    if (b == std::string::npos) throw InvalidConfig("lambda grid needs lo:hi:count[log]");
    const double lo = to_d(s.substr(0, a)), hi = to_d(s.substr(a + 1, b - a - 1));
    std::string count = s.substr(b + 1);
    bool log = false;
    if (count.size() >= 3 && count.compare(count.size() - 3, 3, "log") == 0) {
      log = true;
      count.resize(count.size() - 3);
    } else if (count.size() >= 3 && count.compare(count.size() - 3, 3, "lin") == 0) {
      count.resize(count.size() - 3);
    }
    const double nd = to_d(count);
    if (nd < 1 || nd != std::floor(nd)) throw InvalidConfig("lambda grid count must be a positive integer");
    const auto n = static_cast<std::size_t>(nd);
    if (log && !(lo > 0.0 && hi > 0.0)) throw InvalidConfig("log-spaced lambda grid needs positive bounds");
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
  }
  if (out.empty()) throw InvalidConfig("lambda grid is empty");
  return out;
}

TuneResult tune_lambda(const FederatedDataset& fd, const std::vector<double>& grid, const SrfcaConfig& cfg) {
  if (grid.empty()) throw InvalidConfig("lambda grid is empty");
  cfg.validate();
  const auto node_models = train_node_models(fd, cfg.train);
  const DistanceMatrix dist = node_distances(fd, node_models, cfg);
  std::vector<double> local_loss(fd.num_clients());
  for (std::size_t i = 0; i < fd.num_clients(); ++i)
    local_loss[i] = loss(fd.kind, node_models[i], fd.clients[i].view(Split::Test));

  TuneResult res;
  bool any = false;
  double best = -std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    TunePoint p;
    p.lambda = lambda;
    try {
      const Clustering c = filter_min_size(
          correlation_cluster(threshold_graph(dist, lambda), derive_seed(cfg.seed, 0, StreamTag::Pivot)),
          cfg.min_cluster_size);
      std::vector<ParamVector> models;
      for (const auto& members : c.members()) {
        std::vector<ParamVector> ms;
        for (int i : members) ms.push_back(node_models[static_cast<std::size_t>(i)]);
        models.push_back(mean(ms));
      }
      double gain = 0.0;
      for (std::size_t i = 0; i < fd.num_clients(); ++i) {
        if (!c.assigned(i)) continue;
        const auto& w = models[static_cast<std::size_t>(c.cluster_of(i))];
        gain += local_loss[i] - loss(fd.kind, w, fd.clients[i].view(Split::Test));
      }
      p.objective = gain / static_cast<double>(fd.num_clients());
      p.clusters = c.num_clusters();
      p.unassigned = c.unassigned().size();
      p.ok = true;
      if (p.objective > best) {
        best = p.objective;
        res.lambda = lambda;
      }
      any = true;
    } catch (const NoClusterOfMinSize& e) {
      p.error = e.what();
    }
    res.points.push_back(p);
  }
  if (!any) throw NoClusterOfMinSize(cfg.min_cluster_size);
  return res;
}

ordered_json tune_to_json(const TuneResult& t) {
  ordered_json pts = ordered_json::array();
  for (const auto& p : t.points) {
    ordered_json o{{"lambda", p.lambda}, {"ok", p.ok}};
    if (p.ok) {
      o["clusters"] = p.clusters;
      o["unassigned"] = p.unassigned;
      o["objective"] = p.objective;
    } else {
      o["error"] = p.error;
    }
    pts.push_back(o);
  }
  return ordered_json{{"lambda", t.lambda}, {"points", pts}};
}

}  // namespace fedclust
