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

#include "qkbench/campaign.hpp"

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <atomic>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qkb {

using nlohmann::json;

// ---------------------------------------------------------------- YAML

namespace {

json node_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(node_to_json(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = node_to_json(kv.second);
      return o;
    }
    case YAML::NodeType::Scalar:
      break;
  }
  const std::string s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "True" || s == "yes") return true;
  if (s == "false" || s == "False" || s == "no") return false;
  if (s == "null" || s == "~") return nullptr;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return s;
}

std::vector<json> as_list(const json& v) {
  if (v.is_array()) return std::vector<json>(v.begin(), v.end());
  return {v};
}

template <typename T>
T get_or(const json& o, const char* key, T fallback) {
  return o.contains(key) && !o.at(key).is_null() ? o.at(key).get<T>() : fallback;
}

std::vector<std::string> string_list(const json& o, const char* key) {
  std::vector<std::string> out;
  if (!o.contains(key) || o.at(key).is_null()) return out;
  for (const auto& e : as_list(o.at(key))) out.push_back(e.get<std::string>());
  return out;
}

void require_known_keys(const json& o, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : o.items()) {
    bool ok = false;
    for (const char* known : keys) ok = ok || k == known;
    if (!ok) throw std::invalid_argument(where + ": unknown key '" + k + "'");
  }
}

std::string scalar_text(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

DatasetSpec parse_dataset(const std::string& name, const json& d, const std::filesystem::path& base_dir) {
  require_known_keys(d, {"path", "label", "positive", "group", "zero_as_missing", "drop", "subsample", "synthetic"},
                     "dataset '" + name + "'");
  DatasetSpec s;
  s.name = name;
  if (d.contains("synthetic")) {
    const json& g = d.at("synthetic");
    SyntheticSpec syn;
    syn.generator = get_or<std::string>(g, "generator", "blobs");
    syn.n = get_or<std::size_t>(g, "n", 60);
    syn.separation = get_or<double>(g, "separation", 4.0);
    syn.d = get_or<int>(g, "d", 2);
    syn.noise = get_or<double>(g, "noise", 0.3);
    syn.seed = get_or<std::uint64_t>(g, "seed", 42);
    if (syn.generator != "blobs" && syn.generator != "xor") {
      throw std::invalid_argument("dataset '" + name + "': unknown generator '" + syn.generator + "'");
    }
    s.synthetic = syn;
  } else {
    if (!d.contains("path")) throw std::invalid_argument("dataset '" + name + "': needs 'path' or 'synthetic'");
    if (!d.contains("label")) throw std::invalid_argument("dataset '" + name + "': needs 'label'");
    const std::filesystem::path p = d.at("path").get<std::string>();
    s.path = p.is_absolute() ? p : base_dir / p;
    s.schema.label_column = d.at("label").get<std::string>();
    s.schema.positive_value = d.contains("positive") ? scalar_text(d.at("positive")) : "1";
    if (d.contains("group") && !d.at("group").is_null()) s.schema.group_column = d.at("group").get<std::string>();
    s.schema.zero_as_missing = string_list(d, "zero_as_missing");
    s.schema.drop_columns = string_list(d, "drop");
  }
  if (d.contains("subsample") && !d.at("subsample").is_null()) s.subsample = d.at("subsample").get<std::size_t>();
  return s;
}

json dataset_canonical(const DatasetSpec& s) {
  json j;
  j["name"] = s.name;
  if (s.synthetic) {
    const auto& g = *s.synthetic;
    j["synthetic"] = {{"generator", g.generator}, {"n", g.n},       {"separation", g.separation},
                      {"d", g.d},                 {"noise", g.noise}, {"seed", g.seed}};
  } else {
    // file name only: the same data at another location hashes identically
    j["file"] = s.path ? s.path->filename().string() : "";
    j["label"] = s.schema.label_column;
    j["positive"] = s.schema.positive_value;
    j["group"] = s.schema.group_column ? json(*s.schema.group_column) : json(nullptr);
    j["zero_as_missing"] = s.schema.zero_as_missing;
    j["drop"] = s.schema.drop_columns;
  }
  j["subsample"] = s.subsample ? json(*s.subsample) : json(nullptr);
  return j;
}

KernelConfig parse_kernel(const std::string& name) {
  KernelConfig k;
  try {
    k.classical = classical_from_string(name);
    k.family = KernelFamily::classical;
    return k;
  } catch (const std::invalid_argument&) {
  }
  k.family = KernelFamily::quantum;
  k.map = feature_map_from_string(name);
  return k;
}

}  // namespace

json yaml_to_json(const std::string& yaml_text) { return node_to_json(YAML::Load(yaml_text)); }

json ExperimentConfig::canonical() const {
  json j;
  j["dataset"] = dataset_canonical(dataset);
  j["reducer"] = std::string(to_string(pipeline.reducer));
  j["k"] = pipeline.k;
  j["nmf"] = {pipeline.nmf.max_iter, pipeline.nmf.tol, pipeline.nmf.seed};
  json kj;
  kj["family"] = kernel.family == KernelFamily::quantum ? "quantum" : "classical";
  if (kernel.family == KernelFamily::quantum) {
    kj["map"] = std::string(to_string(kernel.map));
    kj["reps"] = kernel.reps;
    kj["noisy"] = kernel.noisy;
    if (kernel.noisy) kj["noise"] = {kernel.noise.p1q, kernel.noise.p2q};
    kj["qkt"] = kernel.qkt;
    if (kernel.qkt) kj["qkt_max_iter"] = kernel.qkt_options.max_iter;
  } else {
    kj["classical"] = std::string(to_string(kernel.classical));
  }
  j["kernel"] = kj;
  j["cv"] = {{"outer", n_outer}, {"inner", n_inner}};
  j["C"] = C_grid;
  j["seed"] = seed;
  j["learning_curve"] = learning_curve;
  if (learning_curve) j["fractions"] = fractions;
  j["seed_sweep"] = seed_sweep;
  if (seed_sweep > 0) j["sweep_inner"] = sweep_inner;
  j["spectra"] = spectra;
  return j;
}

std::string ExperimentConfig::hash() const { return content_hash(canonical().dump()).hex(); }

Campaign parse_campaign(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw std::invalid_argument("campaign file must be a mapping");
  require_known_keys(doc, {"campaign", "datasets", "experiments"}, "campaign file");
  Campaign c;
  if (doc.contains("campaign")) {
    const json& h = doc.at("campaign");
    require_known_keys(h, {"name", "output", "workers", "cache_dir"}, "campaign");
    c.name = get_or<std::string>(h, "name", c.name);
    const std::filesystem::path out = get_or<std::string>(h, "output", "results.jsonl");
    c.output = out.is_absolute() ? out : base_dir / out;
    c.workers = get_or<int>(h, "workers", 1);
    if (h.contains("cache_dir") && !h.at("cache_dir").is_null()) {
      const std::filesystem::path cd = h.at("cache_dir").get<std::string>();
      c.cache_dir = cd.is_absolute() ? cd : base_dir / cd;
    }
  }
  std::map<std::string, DatasetSpec> datasets;
  if (doc.contains("datasets")) {
    for (const auto& [name, d] : doc.at("datasets").items()) datasets[name] = parse_dataset(name, d, base_dir);
  }
  if (!doc.contains("experiments")) throw std::invalid_argument("campaign file has no 'experiments'");
  std::size_t block = 0;
  std::set<std::string> seen;
  for (const json& e : doc.at("experiments")) {
    ++block;
    const std::string where = "experiment block " + std::to_string(block);
    require_known_keys(e, {"dataset", "reducer", "k", "kernel", "reps", "noisy", "noise", "qkt", "qkt_max_iter", "cv", "C",
                           "seed", "learning_curve", "fractions", "seed_sweep", "sweep_inner", "spectra"},
                       where);
    if (!e.contains("dataset") || !e.contains("kernel")) throw std::invalid_argument(where + ": needs 'dataset' and 'kernel'");
    ExperimentConfig base;
    if (e.contains("cv")) {
      base.n_outer = get_or<int>(e.at("cv"), "outer", 5);
      base.n_inner = get_or<int>(e.at("cv"), "inner", 3);
    }
    if (e.contains("C")) base.C_grid = e.at("C").get<std::vector<double>>();
    base.seed = get_or<std::uint64_t>(e, "seed", 42);
    base.learning_curve = get_or<bool>(e, "learning_curve", false);
    if (e.contains("fractions")) base.fractions = e.at("fractions").get<std::vector<double>>();
    base.seed_sweep = get_or<int>(e, "seed_sweep", 0);
    base.sweep_inner = get_or<int>(e, "sweep_inner", 5);
    base.spectra = get_or<bool>(e, "spectra", true);
    if (e.contains("noise")) {
      base.kernel.noise.p1q = get_or<double>(e.at("noise"), "p1q", kDefaultNoise.p1q);
      base.kernel.noise.p2q = get_or<double>(e.at("noise"), "p2q", kDefaultNoise.p2q);
      base.kernel.noise.validate();
    }
    base.kernel.qkt_options.max_iter = get_or<int>(e, "qkt_max_iter", 170);

    const json reducers = e.contains("reducer") ? e.at("reducer") : json("pca");
    const json ks = e.contains("k") ? e.at("k") : json(4);
    const json reps = e.contains("reps") ? e.at("reps") : json(2);
    const json noisy = e.contains("noisy") ? e.at("noisy") : json(false);
    const json qkt = e.contains("qkt") ? e.at("qkt") : json(false);
    for (const json& dn : as_list(e.at("dataset"))) {
      const auto it = datasets.find(dn.get<std::string>());
      if (it == datasets.end()) throw std::invalid_argument(where + ": unknown dataset '" + dn.get<std::string>() + "'");
      for (const json& rd : as_list(reducers)) {
        for (const json& kv : as_list(ks)) {
          for (const json& kn : as_list(e.at("kernel"))) {
            for (const json& rp : as_list(reps)) {
              for (const json& nz : as_list(noisy)) {
                for (const json& qt : as_list(qkt)) {
                  ExperimentConfig cfg = base;
                  cfg.dataset = it->second;
                  cfg.pipeline.reducer = reducer_from_string(rd.get<std::string>());
                  cfg.pipeline.k = kv.get<int>();
                  const KernelConfig parsed = parse_kernel(kn.get<std::string>());
                  cfg.kernel.family = parsed.family;
                  cfg.kernel.map = parsed.map;
                  cfg.kernel.classical = parsed.classical;
                  cfg.kernel.reps = rp.get<int>();
                  const bool is_quantum = cfg.kernel.family == KernelFamily::quantum;
                  cfg.kernel.noisy = is_quantum && nz.get<bool>();
                  cfg.kernel.qkt = is_quantum && qt.get<bool>();
                  // classical kernels ignore the quantum-only axes, so the
                  // expansion can repeat a config; keep the first
                  if (!seen.insert(cfg.hash()).second) continue;
                  c.experiments.push_back(cfg);
                }
              }
            }
          }
        }
      }
    }
  }
  return c;
}

Campaign load_campaign(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = yaml_to_json(ss.str());
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(file.string() + ": " + e.what());
  }
  return parse_campaign(doc, file.parent_path());
}

Dataset materialise(const DatasetSpec& spec, std::uint64_t seed) {
  Dataset d;
  if (spec.synthetic) {
    const auto& g = *spec.synthetic;
    d = g.generator == "xor" ? make_xor(g.n, g.noise, g.seed) : make_blobs(g.n, g.separation, g.d, g.seed);
  } else {
    d = load_dataset(*spec.path, spec.schema, spec.name);
  }
  d.name = spec.name;
  if (spec.subsample && *spec.subsample < d.size()) {
    const auto rows = stratified_subsample(d.y, *spec.subsample, seed);
    d = d.subset(rows);
  }
  return d;
}

// ---------------------------------------------------------------- records

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json nan_safe(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
  return a;
}

std::vector<double> nan_list(const json& a) {
  std::vector<double> out;
  for (const auto& x : a) out.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
  return out;
}

json spectrum_json(const SpectralProfile& s) {
  return {{"effective_rank_ratio", s.effective_rank_ratio},
          {"top1_variance", s.top1_variance},
          {"top5_variance", s.top5_variance},
          {"diag_dominance", s.diag_dominance},
          {"negative_eig_fraction", s.negative_eig_fraction},
          {"eigenvalues", s.eigenvalues}};
}

SpectralProfile spectrum_from(const json& j) {
  SpectralProfile s;
  s.effective_rank_ratio = j.at("effective_rank_ratio").get<double>();
  s.top1_variance = j.at("top1_variance").get<double>();
  s.top5_variance = j.at("top5_variance").get<double>();
  s.diag_dominance = j.at("diag_dominance").get<double>();
  s.negative_eig_fraction = j.at("negative_eig_fraction").get<double>();
  s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  return s;
}

json agreement_json(const KernelAgreement& a) {
  return {{"pearson_r", a.pearson_r}, {"spearman_rho", a.spearman_rho}, {"mae", a.mae}, {"rmse", a.rmse},
          {"rel_frobenius", a.rel_frobenius}};
}

}  // namespace

json to_json(const MetricBundle& m) {
  return {{"balanced_accuracy", m.balanced_accuracy}, {"f1", m.f1}, {"mcc", m.mcc}, {"roc_auc", opt(m.roc_auc)},
          {"pr_auc", opt(m.pr_auc)}};
}

MetricBundle metrics_from_json(const json& j) {
  MetricBundle m;
  m.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.mcc = j.at("mcc").get<double>();
  m.roc_auc = opt_double(j, "roc_auc");
  m.pr_auc = opt_double(j, "pr_auc");
  return m;
}

json to_json(const FoldResult& f) {
  json j = {{"metrics", to_json(f.metrics)},
            {"chosen_C", f.chosen_C},
            {"inner_mean_ba", nan_safe(f.inner_mean_ba)},
            {"inner_valid", f.inner_valid},
            {"kernel_time_s", f.kernel_time_s},
            {"fit_time_s", f.fit_time_s},
            {"n_train", f.n_train},
            {"n_test", f.n_test},
            {"k_features", f.k_features},
            {"indefinite", f.indefinite},
            {"svm_converged", f.svm_converged},
            {"theta", f.theta ? json(*f.theta) : json(nullptr)},
            {"kta_initial", opt(f.kta_initial)},
            {"kta_final", opt(f.kta_final)},
            {"spectrum", f.spectrum ? spectrum_json(*f.spectrum) : json(nullptr)}};
  return j;
}

FoldResult fold_from_json(const json& j) {
  FoldResult f;
  f.metrics = metrics_from_json(j.at("metrics"));
  f.chosen_C = j.at("chosen_C").get<double>();
  f.inner_mean_ba = nan_list(j.at("inner_mean_ba"));
  f.inner_valid = j.at("inner_valid").get<std::vector<int>>();
  f.kernel_time_s = j.at("kernel_time_s").get<double>();
  f.fit_time_s = j.at("fit_time_s").get<double>();
  f.n_train = j.at("n_train").get<std::size_t>();
  f.n_test = j.at("n_test").get<std::size_t>();
  f.k_features = j.at("k_features").get<int>();
  f.indefinite = j.at("indefinite").get<bool>();
  f.svm_converged = j.at("svm_converged").get<bool>();
  if (!j.at("theta").is_null()) f.theta = j.at("theta").get<std::vector<double>>();
  f.kta_initial = opt_double(j, "kta_initial");
  f.kta_final = opt_double(j, "kta_final");
  if (j.contains("spectrum") && !j.at("spectrum").is_null()) f.spectrum = spectrum_from(j.at("spectrum"));
  return f;
}

json to_json(const ResultRecord& r) {
  json folds = json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  return {{"config_hash", r.config_hash}, {"dataset", r.dataset}, {"kernel", r.kernel},
          {"reducer", r.reducer},         {"k", r.k},             {"folds", folds},
          {"fold_ba", r.fold_ba},         {"mean_ba", r.mean_ba}, {"seed", r.seed},
          {"version", r.version},         {"timestamp", r.timestamp}};
}

ResultRecord record_from_json(const json& j) {
  for (const char* key : {"config_hash", "dataset", "kernel", "folds", "fold_ba", "mean_ba"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("result record lacks field '") + key + "'");
  }
  ResultRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.kernel = j.at("kernel").get<std::string>();
  r.reducer = get_or<std::string>(j, "reducer", "");
  r.k = get_or<int>(j, "k", 0);
  for (const auto& f : j.at("folds")) r.folds.push_back(fold_from_json(f));
  r.fold_ba = j.at("fold_ba").get<std::vector<double>>();
  r.mean_ba = j.at("mean_ba").get<double>();
  r.seed = get_or<std::uint64_t>(j, "seed", 42);
  r.version = get_or<std::string>(j, "version", "");
  r.timestamp = get_or<std::string>(j, "timestamp", "");
  return r;
}

json to_json(const LearningCurve& lc) {
  json pts = json::array();
  for (const auto& p : lc.points) {
    json fb = json::array();
    for (const auto& v : p.fold_ba) fb.push_back(opt(v));
    pts.push_back({{"fraction", p.fraction}, {"fold_ba", fb}, {"mean_ba", opt(p.mean_ba)}, {"mean_n_train", p.mean_n_train}});
  }
  json j = {{"points", pts}};
  if (lc.slope) {
    j["slope"] = {{"slope", lc.slope->slope},
                  {"intercept", lc.slope->intercept},
                  {"p_two_sided", lc.slope->p_two_sided},
                  {"stderr_slope", lc.slope->stderr_slope}};
  } else {
    j["slope"] = nullptr;
  }
  return j;
}

json to_json(const SeedSweep& s) { return {{"seeds", s.seeds}, {"mean_ba", s.mean_ba}, {"cov", s.cov}}; }

json to_json(const BackendReport& r) {
  json scores = json::array();
  for (const auto& s : r.scores) {
    scores.push_back({{"source", s.source}, {"fold_ba", s.fold_ba}, {"mean_ba", s.mean_ba}, {"best_C", s.best_C}});
  }
  return {{"n", r.n},
          {"vs_ideal", agreement_json(r.vs_ideal)},
          {"vs_noisy", r.vs_noisy ? agreement_json(*r.vs_noisy) : json(nullptr)},
          {"scores", scores},
          {"delta_pp", r.delta_pp},
          {"imported_indefinite", r.imported_indefinite},
          {"imported_min_eigenvalue", r.imported_min_eigenvalue}};
}

json to_json(const QktResult& q) {
  return {{"theta_star", q.theta_star}, {"kta_initial", q.kta_initial}, {"kta_final", q.kta_final},
          {"iterations", q.iterations}, {"converged", q.converged},     {"kta_trace", q.kta_trace}};
}

json run_experiment(const ExperimentConfig& cfg, const KernelCache* cache) {
  const Dataset data = materialise(cfg.dataset, cfg.seed);
  const FoldPlan plan = make_fold_plan(data.y, data.groups, cfg.n_outer, cfg.n_inner, cfg.seed);
  NestedCvOptions opts;
  opts.C_grid = cfg.C_grid;
  opts.cache = cache;
  opts.config_hash = cfg.hash();
  opts.spectra = cfg.spectra;
  const ResultRecord rec = nested_cv(data, cfg.pipeline, cfg.kernel, plan, opts);
  json j = to_json(rec);
  j["config"] = cfg.canonical();
  j["family"] = cfg.kernel.family == KernelFamily::quantum ? "quantum" : "classical";
  j["noisy"] = cfg.kernel.noisy;
  j["qkt"] = cfg.kernel.qkt;
  j["n_samples"] = data.size();
  j["synthetic"] = data.synthetic;
  if (cfg.learning_curve) j["learning_curve"] = to_json(learning_curve(data, cfg.pipeline, cfg.kernel, plan, cfg.fractions, opts));
  if (cfg.seed_sweep > 0) {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < cfg.seed_sweep; ++i) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(i));
    j["seed_sweep"] = to_json(seed_sweep(data, cfg.pipeline, cfg.kernel, seeds, cfg.n_outer, cfg.sweep_inner, cfg.C_grid));
  }
  return j;
}

CampaignOutcome run_campaign(const Campaign& campaign) {
  std::optional<KernelCache> cache;
  // QKBENCH_CACHE_DIR, when set, wins over the campaign's cache_dir
  const std::filesystem::path cache_dir = KernelCache::default_dir(campaign.cache_dir.value_or(""));
  if (!cache_dir.empty()) cache.emplace(cache_dir);
  std::ofstream out(campaign.output, std::ios::app);
  if (!out) throw std::runtime_error("cannot open results file " + campaign.output.string());
  std::mutex sink;
  std::atomic<std::size_t> next{0};
  std::atomic<int> ok{0};
  std::atomic<int> failed{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < campaign.experiments.size(); i = next++) {
      const ExperimentConfig& cfg = campaign.experiments[i];
      try {
        const json rec = run_experiment(cfg, cache ? &*cache : nullptr);
        const std::lock_guard<std::mutex> lock(sink);
        out << rec.dump() << '\n';
        out.flush();
        spdlog::info("[{}/{}] {} {} {} k={}: mean BA {:.4f}", i + 1, campaign.experiments.size(), cfg.dataset.name,
                     cfg.kernel.label(), to_string(cfg.pipeline.reducer), cfg.pipeline.k, rec.at("mean_ba").get<double>());
        ++ok;
      } catch (const std::exception& e) {
        spdlog::error("[{}/{}] {} {} failed: {}", i + 1, campaign.experiments.size(), cfg.dataset.name,
                      cfg.kernel.label(), e.what());
        ++failed;
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(campaign.workers, static_cast<int>(campaign.experiments.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  return {ok.load(), failed.load()};
}

std::vector<json> read_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open " + file.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(file.string() + ": line " + std::to_string(n) + " is not JSON: " + e.what());
    }
  }
  return out;
}

}  // namespace qkb
