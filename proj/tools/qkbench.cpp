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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qkbench/campaign.hpp"
#include "qkbench/circuit.hpp"
#include "qkbench/report.hpp"

namespace {

using nlohmann::json;
using namespace qkb;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

const ExperimentConfig& pick_experiment(const Campaign& c, std::size_t index) {
  if (index >= c.experiments.size()) {
    throw std::invalid_argument("experiment index " + std::to_string(index) + " out of range (campaign has " +
                                std::to_string(c.experiments.size()) + ")");
  }
  return c.experiments[index];
}

// Whole-dataset features under the experiment's pipeline.
Eigen::MatrixXd full_features(const ExperimentConfig& cfg, const Dataset& data) {
  PipelineSpec ps = cfg.pipeline;
  if (ps.zero_as_missing.empty()) ps.zero_as_missing = data.zero_as_missing;
  return fit_pipeline(ps, data.X, data.y).transform(data.X);
}

int cmd_run(const std::string& config, int workers, const std::string& output) {
  Campaign c = load_campaign(config);
  if (workers > 0) c.workers = workers;
  if (!output.empty()) c.output = output;
  spdlog::info("campaign '{}': {} experiments, {} workers -> {}", c.name, c.experiments.size(), c.workers,
               c.output.string());
  const CampaignOutcome o = run_campaign(c);
  spdlog::info("done: {} ok, {} failed", o.succeeded, o.failed);
  return o.failed > 0 ? kExitPartial : kExitOk;
}

int cmd_report(const std::string& mode, const std::string& input, const std::string& out) {
  emit(make_report(read_jsonl(input), mode), out);
  return kExitOk;
}

int cmd_circuit(const std::string& map, int k, int reps, bool abstract_gates, bool list_gates) {
  FeatureMapSpec spec{feature_map_from_string(map), k, reps, std::nullopt};
  spec.validate();
  const std::vector<double> x(static_cast<std::size_t>(k), 0.5);
  const Circuit abstract = build_feature_map(spec, x);
  const Circuit c = abstract_gates ? abstract : decompose_native(abstract);
  const CircuitMetrics m = circuit_metrics(c);
  json j = {{"map", map},
            {"k", k},
            {"reps", reps},
            {"gate_set", abstract_gates ? "abstract" : "native"},
            {"n_qubits", m.n_qubits},
            {"depth", m.depth},
            {"two_qubit_count", m.two_qubit_count},
            {"gate_count", m.gate_count},
            {"gate_slot_count", m.gate_slot_count}};
  if (list_gates) {
    json gates = json::array();
    for (const Gate& g : c) {
      json e = {{"gate", std::string(to_string(g.kind))}, {"qubits", json::array({g.qubits[0]})}};
      if (g.arity() == 2) e["qubits"].push_back(g.qubits[1]);
      if (is_rotation(g.kind)) e["angle"] = g.angle;
      gates.push_back(e);
    }
    j["gates"] = gates;
  }
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_qkt(const std::string& config, int only) {
  const Campaign c = load_campaign(config);
  int failed = 0;
  for (std::size_t i = 0; i < c.experiments.size(); ++i) {
    if (only >= 0 && static_cast<std::size_t>(only) != i) continue;
    const ExperimentConfig& cfg = c.experiments[i];
    if (cfg.kernel.family != KernelFamily::quantum) continue;
    try {
      const Dataset data = materialise(cfg.dataset, cfg.seed);
      const Eigen::MatrixXd F = full_features(cfg, data);
      FeatureMapSpec spec{cfg.kernel.map, static_cast<int>(F.cols()), cfg.kernel.reps, std::nullopt};
      json j = to_json(optimize_theta(F, data.y, spec, cfg.kernel.qkt_options));
      j["experiment"] = i;
      j["dataset"] = data.name;
      j["kernel"] = cfg.kernel.label();
      j["config_hash"] = cfg.hash();
      std::cout << j.dump() << "\n";
    } catch (const std::exception& e) {
      spdlog::error("experiment {}: {}", i, e.what());
      ++failed;
    }
  }
  return failed > 0 ? kExitPartial : kExitOk;
}

int cmd_kernel_export(const std::string& config, std::size_t index, const std::string& out, const std::string& csv) {
  const Campaign c = load_campaign(config);
  const ExperimentConfig& cfg = pick_experiment(c, index);
  const Dataset data = materialise(cfg.dataset, cfg.seed);
  const Eigen::MatrixXd F = full_features(cfg, data);
  const FoldKernels fk = compute_fold_kernels(cfg.kernel, F, Eigen::MatrixXd(0, F.cols()), data.y, data.name);
  KernelMatrix K;
  K.values = fk.train;
  K.provenance.pathway = cfg.kernel.family == KernelFamily::classical ? Pathway::classical
                         : cfg.kernel.noisy                           ? Pathway::noisy
                                                                      : Pathway::ideal;
  K.provenance.config_hash = content_hash(cfg.canonical().dump());
  K.provenance.indefinite = fk.indefinite;
  write_kernel_file(out, K);
  if (!csv.empty()) write_kernel_csv(csv, K.values);
  spdlog::info("wrote {}x{} {} kernel to {}", K.rows(), K.cols(), to_string(K.provenance.pathway), out);
  return kExitOk;
}

int cmd_kernel_import(const std::string& file, const std::string& out) {
  const KernelMatrix K = import_kernel(file);
  json j = {{"rows", K.rows()},
            {"cols", K.cols()},
            {"pathway", std::string(to_string(K.provenance.pathway))},
            {"indefinite", K.provenance.indefinite},
            {"min_eigenvalue", min_eigenvalue(K.values)}};
  if (K.rows() == K.cols()) {
    const SpectralProfile s = spectral_profile(K.values);
    j["effective_rank_ratio"] = s.effective_rank_ratio;
    j["top1_variance"] = s.top1_variance;
    j["negative_eig_fraction"] = s.negative_eig_fraction;
  }
  if (!out.empty()) write_kernel_file(out, K);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_kernel_compare(const std::string& imported, const std::string& config, std::size_t index, bool noisy,
                       const std::string& label, const std::string& out) {
  const Campaign c = load_campaign(config);
  const ExperimentConfig& cfg = pick_experiment(c, index);
  if (cfg.kernel.family != KernelFamily::quantum) throw std::invalid_argument("kernel compare needs a quantum experiment");
  const Dataset data = materialise(cfg.dataset, cfg.seed);
  const Eigen::MatrixXd F = full_features(cfg, data);
  FeatureMapSpec spec{cfg.kernel.map, static_cast<int>(F.cols()), cfg.kernel.reps, std::nullopt};
  const KernelMatrix K = import_kernel(imported);
  std::optional<NoiseModel> noise;
  if (noisy) noise = cfg.kernel.noise;
  json j = to_json(validate_backend(K, F, data.y, spec, noise, cfg.seed));
  j["label"] = label.empty() ? std::filesystem::path(imported).stem().string() : label;
  j["dataset"] = data.name;
  j["kernel"] = cfg.kernel.label();
  emit(j.dump() + "\n", out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkbench: quantum kernel benchmarking engine"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  std::string config;
  std::string output;
  std::string out;
  std::string mode;
  std::string input;
  int workers = 0;

  auto* run = app.add_subcommand("run", "Run every experiment in a campaign config, appending JSONL records");
  run->add_option("config", config, "Campaign YAML file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Override campaign.workers");
  run->add_option("--output", output, "Override campaign.output");

  auto* report = app.add_subcommand("report", "Summarise JSONL results");
  std::string modes_help = "One of:";
  for (const auto& m : report_modes()) modes_help += " " + m;
  report->add_option("--mode", mode, modes_help)->required()->check(CLI::IsMember(report_modes()));
  report->add_option("results", input, "JSONL results file")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out, "Write to a file instead of stdout");

  auto* kernel = app.add_subcommand("kernel", "Export, import or compare kernel matrices");
  kernel->require_subcommand(1);
  std::size_t index = 0;
  std::string csv;
  std::string file;
  std::string label;
  bool noisy = false;
  auto* kexport = kernel->add_subcommand("export", "Whole-dataset train kernel of one experiment to a container file");
  kexport->add_option("config", config, "Campaign YAML file")->required()->check(CLI::ExistingFile);
  kexport->add_option("--experiment", index, "Experiment index after grid expansion");
  kexport->add_option("--out", out, "Container file")->required();
  kexport->add_option("--csv", csv, "Also write a CSV copy");
  auto* kimport = kernel->add_subcommand("import", "Validate an external kernel (container or .csv)");
  kimport->add_option("file", file, "Kernel file")->required()->check(CLI::ExistingFile);
  kimport->add_option("--out", out, "Re-save as a container file");
  auto* kcompare = kernel->add_subcommand("compare", "Compare an imported kernel against simulated references");
  kcompare->add_option("file", file, "Imported kernel file")->required()->check(CLI::ExistingFile);
  kcompare->add_option("config", config, "Campaign YAML file describing the samples")->required()->check(CLI::ExistingFile);
  kcompare->add_option("--experiment", index, "Experiment index after grid expansion");
  kcompare->add_flag("--noisy", noisy, "Also compare against the noisy simulated kernel");
  kcompare->add_option("--label", label, "Report label");
  kcompare->add_option("--out", out, "Append-free output file (JSON line)");

  auto* circuit = app.add_subcommand("circuit", "Circuit utilities");
  circuit->require_subcommand(1);
  std::string map;
  int k = 0;
  int reps = 2;
  bool abstract_gates = false;
  bool list_gates = false;
  auto* inspect = circuit->add_subcommand("inspect", "Depth and gate counts of a feature map");
  inspect->add_option("--map", map, "rot2dof|belis|sakhnenko10|zzfm")->required();
  inspect->add_option("--k", k, "Feature count")->required();
  inspect->add_option("--reps", reps, "Repetitions");
  inspect->add_flag("--abstract", abstract_gates, "Report the undecomposed circuit");
  inspect->add_flag("--gates", list_gates, "Include the gate list");

  auto* qkt = app.add_subcommand("qkt", "Optimise per-feature scalings for the quantum experiments of a config");
  int only = -1;
  qkt->add_option("config", config, "Campaign YAML file")->required()->check(CLI::ExistingFile);
  qkt->add_option("--experiment", only, "Restrict to one experiment index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("qkbench"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(config, workers, output);
    if (*report) return cmd_report(mode, input, out);
    if (*kexport) return cmd_kernel_export(config, index, out, csv);
    if (*kimport) return cmd_kernel_import(file, out);
    if (*kcompare) return cmd_kernel_compare(file, config, index, noisy, label, out);
    if (*inspect) return cmd_circuit(map, k, reps, abstract_gates, list_gates);
    if (*qkt) return cmd_qkt(config, only);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
