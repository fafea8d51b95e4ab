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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkbench/campaign.hpp"
#include "qkbench/report.hpp"

namespace qkb {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("qkb_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path path_;
};

int run_cli(const std::string& args, std::string* out = nullptr, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(QKB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return -1;
  std::string text;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) text += buf;
  const int status = pclose(pipe);
  if (out != nullptr) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------- datasets

TEST(LoadDataset, FourRowExample) {
  TempDir t;
  const fs::path p = t.write("d.csv", "f1,f2,label\n1,2,a\n3,4,a\n5,6,b\n7,8,b\n");
  const Dataset d = load_dataset(p, {"label", "a", {}, {}, {}}, "tiny");
  EXPECT_EQ(d.X.rows(), 4);
  EXPECT_EQ(d.X.cols(), 2);
  EXPECT_EQ(d.y, (std::vector<int>{1, 1, -1, -1}));
  EXPECT_EQ(d.X(2, 1), 6.0);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"f1", "f2"}));
  EXPECT_FALSE(d.groups.has_value());
}

TEST(LoadDataset, NonNumericCellNamesRowAndColumn) {
  TempDir t;
  const fs::path p = t.write("d.csv", "f1,f2,label\n1,2,a\n3,oops,b\n");
  try {
    (void)load_dataset(p, {"label", "a", {}, {}, {}});
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("f2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  }
}

TEST(LoadDataset, Errors) {
  TempDir t;
  EXPECT_THROW((void)load_dataset(t.write("a.csv", "f1,label\n1,a\n2,b\n"), {"target", "a", {}, {}, {}}),
               std::invalid_argument);
  EXPECT_THROW((void)load_dataset(t.write("b.csv", "f1,label\n1,a\n2,a\n"), {"label", "a", {}, {}, {}}),
               std::invalid_argument);
  EXPECT_THROW((void)load_dataset(t.write("c.csv", "f1,f2,label\n1,2,a\n2,b\n"), {"label", "a", {}, {}, {}}),
               std::invalid_argument);
}

TEST(LoadDataset, GroupsAndDropsAndRawZeros) {
  TempDir t;
  const fs::path p = t.write("g.csv",
                             "id,spk,x,z,label\n"
                             "1,s1,0.5,0,1\n2,s1,0.7,3,0\n3,s2,0.1,4,1\n4,s3,0.2,0,0\n");
  const Dataset d = load_dataset(p, {"label", "1", "spk", {"z"}, {"id"}});
  ASSERT_TRUE(d.groups.has_value());
  EXPECT_EQ((*d.groups)[0], (*d.groups)[1]);
  EXPECT_NE((*d.groups)[0], (*d.groups)[2]);
  EXPECT_EQ(d.X.cols(), 2);
  EXPECT_EQ(d.zero_as_missing, std::vector<int>{1});
  EXPECT_EQ(d.X(0, 1), 0.0);  // imputation is deferred to fold fitting
}

// ---------------------------------------------------------------- configs

const char* kCampaign = R"(
campaign:
  name: t
  output: out.jsonl
  workers: 2
datasets:
  blobs:
    synthetic: {generator: blobs, n: 40, separation: 5, d: 2, seed: 3}
experiments:
  - dataset: blobs
    reducer: [none, pca]
    k: 2
    kernel: [linear, rot2dof]
    noisy: [false, true]
    cv: {outer: 3, inner: 2}
    spectra: false
)";

TEST(Campaign, ExpansionAndDedupe) {
  const Campaign c = parse_campaign(yaml_to_json(kCampaign), "/base");
  // quantum: 2 reducers x 2 noise settings; classical ignores the noise axis
  EXPECT_EQ(c.experiments.size(), 6U);
  EXPECT_EQ(c.output, fs::path("/base/out.jsonl"));
  EXPECT_EQ(c.workers, 2);
  std::set<std::string> hashes;
  for (const auto& e : c.experiments) hashes.insert(e.hash());
  EXPECT_EQ(hashes.size(), c.experiments.size());
}

TEST(Campaign, CanonicalHashIgnoresKeyOrder) {
  const char* a = R"(
datasets:
  b: {synthetic: {generator: xor, n: 30, noise: 0.2, seed: 1}}
experiments:
  - {dataset: b, kernel: rbf, reducer: none, k: 2, C: [0.1, 1], seed: 5}
)";
  const char* b = R"(
experiments:
  - {seed: 5, C: [0.1, 1], k: 2, reducer: none, kernel: rbf, dataset: b}
datasets:
  b: {synthetic: {seed: 1, noise: 0.2, n: 30, generator: xor}}
)";
  const Campaign ca = parse_campaign(yaml_to_json(a), "/x");
  const Campaign cb = parse_campaign(yaml_to_json(b), "/y");
  ASSERT_EQ(ca.experiments.size(), 1U);
  EXPECT_EQ(ca.experiments[0].hash(), cb.experiments[0].hash());
  ExperimentConfig changed = ca.experiments[0];
  changed.seed = 6;
  EXPECT_NE(changed.hash(), ca.experiments[0].hash());
}

TEST(Campaign, Rejections) {
  EXPECT_THROW(parse_campaign(yaml_to_json("experiments:\n  - {dataset: a, kernel: rbf, colour: red}\n"), "/"),
               std::invalid_argument);
  EXPECT_THROW(parse_campaign(yaml_to_json("experiments:\n  - {dataset: missing, kernel: rbf}\n"), "/"),
               std::invalid_argument);
  EXPECT_THROW(parse_campaign(yaml_to_json("datasets: {}\n"), "/"), std::invalid_argument);
  EXPECT_THROW(parse_campaign(yaml_to_json("datasets:\n  a: {synthetic: {generator: moons}}\nexperiments: []\n"), "/"),
               std::invalid_argument);
}

TEST(Campaign, SyntheticProvenance) {
  const Campaign c = parse_campaign(yaml_to_json(kCampaign), "/base");
  const Dataset d = materialise(c.experiments[0].dataset, 42);
  EXPECT_TRUE(d.synthetic);
  EXPECT_EQ(d.provenance, "synthetic:blobs");
  EXPECT_EQ(d.size(), 40U);
}

// ---------------------------------------------------------------- records

TEST(Records, JsonRoundTrip) {
  const Campaign c = parse_campaign(yaml_to_json(kCampaign), "/base");
  ExperimentConfig cfg = c.experiments[1];
  cfg.spectra = true;
  const json line = run_experiment(cfg, nullptr);
  const ResultRecord r = record_from_json(line);
  EXPECT_EQ(r.fold_ba.size(), 3U);
  const json again = to_json(r);
  for (const auto& [key, value] : again.items()) {
    ASSERT_TRUE(line.contains(key)) << key;
    EXPECT_EQ(line.at(key), value) << key;
  }
  EXPECT_EQ(to_json(record_from_json(json::parse(line.dump()))), again);
}

// ---------------------------------------------------------------- binary

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("report --mode nonsense /dev/null"), 1);
  std::string out;
  EXPECT_EQ(run_cli("circuit inspect --map zzfm --k 4", &out), 0);
  EXPECT_NE(out.find("24"), std::string::npos) << out;
}

TEST(Binary, RunRerunAndPartialFailure) {
  TempDir t;
  const fs::path cfg = t.write("c.yaml", R"(
campaign: {output: r.jsonl, cache_dir: cache}
datasets:
  blobs: {synthetic: {generator: blobs, n: 60, separation: 4, d: 2, seed: 42}}
experiments:
  - {dataset: blobs, reducer: none, k: 2, kernel: rbf, cv: {outer: 5, inner: 3}}
)");
  ASSERT_EQ(run_cli("run " + cfg.string()), 0);
  ASSERT_EQ(run_cli("run " + cfg.string()), 0);
  const auto lines = read_jsonl(t.path() / "r.jsonl");
  ASSERT_EQ(lines.size(), 2U);
  EXPECT_EQ(lines[0].at("fold_ba").size(), 5U);
  EXPECT_EQ(lines[0].at("fold_ba"), lines[1].at("fold_ba"));
  EXPECT_EQ(lines[0].at("mean_ba"), lines[1].at("mean_ba"));
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(lines[0].at("folds")[f].at("metrics"), lines[1].at("folds")[f].at("metrics"));
    EXPECT_EQ(lines[0].at("folds")[f].at("chosen_C"), lines[1].at("folds")[f].at("chosen_C"));
  }

  // k larger than the feature count fails at fit time; the other experiment still runs
  const fs::path bad = t.write("bad.yaml", R"(
campaign: {output: p.jsonl}
datasets:
  blobs: {synthetic: {generator: blobs, n: 40, d: 2}}
experiments:
  - {dataset: blobs, reducer: pca, k: [2, 5], kernel: linear, cv: {outer: 3, inner: 2}}
)");
  EXPECT_EQ(run_cli("run " + bad.string()), 2);
  EXPECT_EQ(read_jsonl(t.path() / "p.jsonl").size(), 1U);

  std::string csv;
  EXPECT_EQ(run_cli("report --mode summary " + (t.path() / "r.jsonl").string(), &csv), 0);
  EXPECT_NE(csv.find("blobs"), std::string::npos) << csv;
}

TEST(Binary, CacheDirFromEnvironment) {
  TempDir t;
  const fs::path cfg = t.write("c.yaml", R"(
campaign: {output: r.jsonl, cache_dir: from_config}
datasets:
  blobs: {synthetic: {generator: blobs, n: 30, d: 2}}
experiments:
  - {dataset: blobs, reducer: none, k: 2, kernel: rot2dof, cv: {outer: 3, inner: 2}}
)");
  const fs::path env_dir = t.path() / "from_env";
  ASSERT_EQ(run_cli("run " + cfg.string(), nullptr, "QKBENCH_CACHE_DIR=" + env_dir.string()), 0);
  EXPECT_TRUE(fs::exists(env_dir));
  EXPECT_FALSE(fs::is_empty(env_dir));
  EXPECT_FALSE(fs::exists(t.path() / "from_config"));
}

// ---------------------------------------------------------------- reports

std::vector<json> small_records() {
  const Campaign c = parse_campaign(yaml_to_json(kCampaign), "/base");
  std::vector<json> out;
  for (const auto& e : c.experiments) out.push_back(run_experiment(e, nullptr));
  return out;
}

TEST(Report, ModesOnSmallCampaign) {
  const auto records = small_records();
  const std::string summary = make_report(records, "summary");
  EXPECT_NE(summary.find("blobs"), std::string::npos);
  const std::string factors = make_report(records, "factors");
  EXPECT_NE(factors.find("reducer"), std::string::npos) << factors;
  EXPECT_THROW((void)make_report(records, "learning"), std::invalid_argument);
  EXPECT_THROW((void)make_report(records, "no-such-mode"), std::invalid_argument);
  EXPECT_THROW((void)make_report({}, "summary"), std::invalid_argument);
  EXPECT_EQ(record_category(records[0]), "classical");
}

TEST(Report, MissingFieldIsNamed) {
  auto records = small_records();
  for (json& r : records) r.erase("fold_ba");
  try {
    (void)make_report(records, "wilcoxon");
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("fold_ba"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace qkb
