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

#include "fedclust/baselines.hpp"
#include "fedclust/data.hpp"
#include "fedclust/srfca.hpp"
#include "json.hpp"

namespace fedclust {

enum class Algorithm { Srfca, Ifca, Local, Global };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
std::vector<Algorithm> parse_algorithm_list(const std::string& csv);

enum class ReportFormat { Json, Csv };
ReportFormat parse_report_format(const std::string& s);

struct DatasetSpec {
  enum class Type { Synthetic, Path, Transform };
  Type type = Type::Synthetic;
  SyntheticSpec synthetic;            // seed replaced per experiment seed
  std::filesystem::path path;         // Path: federation directory; Transform: table CSV
  std::vector<Transform> transforms;  // Transform only
  std::size_t m = 0, n = 0;           // Transform only
  double train_fraction = 0.8;        // Transform only
};

/// One JSON document; see README for the schema.
struct ExperimentConfig {
  DatasetSpec dataset;
  std::vector<Algorithm> algorithms{Algorithm::Srfca, Algorithm::Ifca, Algorithm::Local, Algorithm::Global};
  TrainConfig train;
  SrfcaConfig srfca;               // srfca.train is replaced by `train`
  std::vector<double> lambda_grid;  // tune lambda per seed when set and srfca.lambda is unset
  bool final_fit = true;            // retrain cluster models on the final clustering
  IfcaConfig ifca;                  // ifca.train is replaced by `train`
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir;
  ReportFormat format = ReportFormat::Json;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the federation for one experiment seed.
FederatedDataset materialize_dataset(const DatasetSpec& spec, std::uint64_t seed);

struct CellResult {
  Algorithm algorithm = Algorithm::Srfca;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double test_loss = 0.0;
  std::optional<double> test_accuracy;
  std::optional<double> misclustering;  // present iff the data has ground truth
  std::optional<bool> exact_match;
  std::size_t clusters = 0;
  std::optional<double> lambda;  // SR-FCA only
  double wall_seconds = 0.0;     // not part of the deterministic report

  bool operator==(const CellResult&) const = default;
};

struct Stat {
  std::optional<double> mean;
  std::optional<double> std;  // unbiased; absent with fewer than two values
  bool operator==(const Stat&) const = default;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::Srfca;
  std::size_t cells_ok = 0;
  Stat test_loss, test_accuracy, misclustering;
  bool operator==(const AlgorithmSummary&) const = default;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::vector<AlgorithmSummary> summary;

  bool any_failed() const;
};

Stat mean_std(const std::vector<double>& values);
std::vector<AlgorithmSummary> summarize(const std::vector<CellResult>& cells,
                                        const std::vector<Algorithm>& algorithms);

/// Runs every (seed, algorithm) cell. A failing cell records its error and
/// the run continues. When cfg.output_dir is set, SR-FCA round traces are
/// written under it.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Deterministic content only; timings go through emit_timings.
nlohmann::ordered_json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);
std::string report_to_csv(const ExperimentReport& r);
void emit_report(const ExperimentReport& r, ReportFormat format, const std::filesystem::path& path);
void emit_timings(const ExperimentReport& r, const std::filesystem::path& path);

/// Per-round clustering CSVs and a JSON summary of an SR-FCA run.
void write_round_trace(const SrfcaResult& result, const std::filesystem::path& dir);

struct TunePoint {
  double lambda = 0.0;
  bool ok = false;
  std::string error;
  std::size_t clusters = 0;
  std::size_t unassigned = 0;
  double objective = 0.0;
};

struct TuneResult {
  double lambda = 0.0;
  std::vector<TunePoint> points;
};

/// ONE_SHOT per grid value. Objective: mean over clients of the held-out
/// loss of the local model minus that of the client's cluster model (member
/// mean); unassigned clients score 0. Highest objective wins, ties to the
/// earlier grid entry. Throws NoClusterOfMinSize when no value yields a cluster.
TuneResult tune_lambda(const FederatedDataset& fd, const std::vector<double>& grid, const SrfcaConfig& cfg);

/// "a:b:Nlog" (log-spaced), "a:b:N" (linear) or "v1,v2,...".
std::vector<double> parse_lambda_grid(const std::string& s);

nlohmann::ordered_json tune_to_json(const TuneResult& t);

}  // namespace fedclust
