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

// fedclust command line: run experiments, generate synthetic federations and
// tune the SR-FCA threshold.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedclust/error.hpp"
#include "fedclust/harness.hpp"

namespace fs = std::filesystem;
using namespace fedclust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

SyntheticSpec parse_synthetic(const std::string& text) {
  SyntheticSpec s;
  std::stringstream ss(text);
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidConfig("expected key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    try {
      if (key == "m") s.m = std::stoul(val);
      else if (key == "n") s.n = std::stoul(val);
      else if (key == "d") s.d = std::stoul(val);
      else if (key == "c" || key == "clusters") s.clusters = std::stoul(val);
      else if (key == "sigma") s.sigma = std::stod(val);
      else if (key == "train_fraction") s.train_fraction = std::stod(val);
      else if (key == "seed") s.seed = std::stoull(val);
      else throw InvalidConfig("unknown synthetic key '" + key + "'");
    } catch (const std::logic_error&) {
      throw InvalidConfig("bad value for '" + key + "': '" + val + "'");
    }
  }
  s.validate();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path, algos, out_dir, format, synthetic, grid;
  std::vector<std::uint64_t> seeds;

  auto* run = app.add_subcommand("run", "Run an experiment grid");
  run->add_option("--config", config_path, "Experiment JSON")->required();
  run->add_option("--seed", seeds, "Seed(s) overriding the config");
  run->add_option("--algo", algos, "Comma-separated algorithms (srfca,ifca,local,global)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* gen = app.add_subcommand("gen", "Write a synthetic federation to disk");
  gen->add_option("--synthetic", synthetic, "m=..,n=..,d=..,c=..,sigma=..")->required();
  gen->add_option("--seed", seeds, "Generator seed")->expected(0, 1);
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* tune = app.add_subcommand("tune", "Pick the SR-FCA threshold on a grid");
  tune->add_option("--config", config_path, "Experiment JSON")->required();
  tune->add_option("--lambda-grid", grid, "lo:hi:N[log] or v1,v2,...")->required();
  tune->add_option("--seed", seeds, "Seed(s) overriding the config");
  tune->add_option("--out", out_dir, "Write tune.json here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      SyntheticSpec spec = parse_synthetic(synthetic);
      if (!seeds.empty()) spec.seed = seeds.front();
      save_federated_csv(gen_mixture_linreg(spec), out_dir);
      return kExitOk;
    }

    ExperimentConfig cfg = load_config(config_path);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    if (*tune) {
      cfg.validate();
      const auto values = parse_lambda_grid(grid);
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (std::uint64_t seed : cfg.seeds) {
        const FederatedDataset fd = materialize_dataset(cfg.dataset, seed);
        SrfcaConfig sc = cfg.srfca;
        sc.seed = seed;
        auto j = tune_to_json(tune_lambda(fd, values, sc));
        nlohmann::ordered_json entry{{"seed", seed}};
        entry.update(j);
        out.push_back(entry);
      }
      if (cfg.output_dir.empty()) {
        std::cout << out.dump(2) << '\n';
      } else {
        fs::create_directories(cfg.output_dir);
        std::ofstream f(cfg.output_dir / "tune.json");
        f << out.dump(2) << '\n';
        if (!f) throw IoError("failed writing tune.json");
      }
      return kExitOk;
    }

    if (!algos.empty()) cfg.algorithms = parse_algorithm_list(algos);
    if (!format.empty()) cfg.format = parse_report_format(format);
    cfg.validate();
    const ExperimentReport report = run_experiment(cfg);
    for (const auto& c : report.cells)
      if (!c.ok) std::cerr << "cell " << to_string(c.algorithm) << " seed " << c.seed << " failed: " << c.error << '\n';
    if (cfg.output_dir.empty()) {
      if (cfg.format == ReportFormat::Json)
        std::cout << report_to_json(report).dump(2) << '\n';
      else
        std::cout << report_to_csv(report);
    } else {
      const char* name = cfg.format == ReportFormat::Json ? "report.json" : "report.csv";
      emit_report(report, cfg.format, cfg.output_dir / name);
      emit_timings(report, cfg.output_dir / "timings.json");
    }
    return report.any_failed() ? kExitPartial : kExitOk;
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
