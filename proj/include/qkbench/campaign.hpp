// Copyright 2026 The qkbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qkbench/dataset.hpp"
#include "qkbench/eval.hpp"
#include "qkbench/hwcompare.hpp"

namespace qkb {

// The configuration grammar is documented in docs/config.md.

struct SyntheticSpec {
  std::string generator = "blobs";  // blobs | xor
  std::size_t n = 60;
  double separation = 4.0;  // blobs
  int d = 2;                // blobs
  double noise = 0.3;       // xor
  std::uint64_t seed = 42;
};

struct DatasetSpec {
  std::string name;
  std::optional<std::filesystem::path> path;
  CsvSchema schema;
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::size_t> subsample;  // stratified, seeded by the experiment seed
};

struct ExperimentConfig {
  DatasetSpec dataset;
  PipelineSpec pipeline;
  KernelConfig kernel;
  int n_outer = 5;
  int n_inner = 3;
  std::vector<double> C_grid = kDefaultCGrid;
  std::uint64_t seed = 42;
  bool learning_curve = false;
  std::vector<double> fractions = kDefaultFractions;
  int seed_sweep = 0;  // number of extra plan seeds (seed, seed+1, ...); 0 disables
  int sweep_inner = 5;
  bool spectra = true;

  /// Key-order independent serialisation used for hashing.
  [[nodiscard]] nlohmann::json canonical() const;
  [[nodiscard]] std::string hash() const;
};

struct Campaign {
  std::string name = "campaign";
  std::filesystem::path output = "results.jsonl";
  int workers = 1;
  std::optional<std::filesystem::path> cache_dir;
  std::vector<ExperimentConfig> experiments;
};

/// Converts YAML text to JSON (quoted scalars stay strings).
nlohmann::json yaml_to_json(const std::string& yaml_text);

/// Parses a campaign document; relative paths resolve against `base_dir`.
Campaign parse_campaign(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Campaign load_campaign(const std::filesystem::path& file);

Dataset materialise(const DatasetSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------- records

nlohmann::json to_json(const MetricBundle& m);
nlohmann::json to_json(const FoldResult& f);
nlohmann::json to_json(const ResultRecord& r);
nlohmann::json to_json(const LearningCurve& lc);
nlohmann::json to_json(const SeedSweep& s);
nlohmann::json to_json(const BackendReport& r);
nlohmann::json to_json(const QktResult& q);

MetricBundle metrics_from_json(const nlohmann::json& j);
FoldResult fold_from_json(const nlohmann::json& j);
ResultRecord record_from_json(const nlohmann::json& j);

/// One JSONL line per experiment: the ResultRecord fields plus "config",
/// and "learning_curve" / "seed_sweep" when requested.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const KernelCache* cache);

struct CampaignOutcome {
  int succeeded = 0;
  int failed = 0;
};

/// Runs every experiment on `workers` threads and appends records to
/// campaign.output. Failures are logged and counted, never fatal.
CampaignOutcome run_campaign(const Campaign& campaign);

/// Reads a JSON Lines file; blank lines are skipped.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& file);

}  // namespace qkb
