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

#include "qkbench/report.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qkbench/stats.hpp"

namespace qkb {

using nlohmann::json;

namespace {

const json& need(const json& r, const char* key, std::string_view mode) {
  if (!r.contains(key) || r.at(key).is_null()) {
    throw std::invalid_argument("report --mode " + std::string(mode) + ": record lacks field '" + key + "'");
  }
  return r.at(key);
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string describe(const json& r) {
  std::string s = r.value("kernel", "?");
  if (r.contains("reducer") && r.contains("k")) s += " " + r.at("reducer").get<std::string>() + "/k=" + r.at("k").dump();
  return s;
}

// Best record (by mean BA, first on ties) per dataset for one category.
std::map<std::string, const json*> best_by_dataset(const std::vector<json>& records, const std::string& category,
                                                   std::string_view mode) {
  std::map<std::string, const json*> best;
  for (const auto& r : records) {
    const std::string ds = need(r, "dataset", mode).get<std::string>();
    if (record_category(r) != category) continue;
    const double ba = need(r, "mean_ba", mode).get<double>();
    auto it = best.find(ds);
    if (it == best.end() || ba > it->second->at("mean_ba").get<double>()) best[ds] = &r;
  }
  return best;
}

std::set<std::string> datasets_of(const std::vector<json>& records, std::string_view mode) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(need(r, "dataset", mode).get<std::string>());
  return out;
}

std::string summary(const std::vector<json>& records) {
  const auto cls = best_by_dataset(records, "classical", "summary");
  const auto qi = best_by_dataset(records, "quantum-ideal", "summary");
  const auto qn = best_by_dataset(records, "quantum-noisy", "summary");
  const auto qt = best_by_dataset(records, "qkt", "summary");
  std::ostringstream os;
  os << "dataset,best_classical,ba_classical,best_quantum_ideal,ba_quantum_ideal,best_quantum_noisy,ba_quantum_noisy,"
        "best_qkt,ba_qkt,delta\n";
  auto cell = [](const std::map<std::string, const json*>& m, const std::string& ds) -> std::pair<std::string, std::optional<double>> {
    const auto it = m.find(ds);
    if (it == m.end()) return {"", std::nullopt};
    return {describe(*it->second), it->second->at("mean_ba").get<double>()};
  };
  for (const auto& ds : datasets_of(records, "summary")) {
    const auto [c_name, c_ba] = cell(cls, ds);
    const auto [i_name, i_ba] = cell(qi, ds);
    const auto [n_name, n_ba] = cell(qn, ds);
    const auto [t_name, t_ba] = cell(qt, ds);
    std::optional<double> delta;
    if (c_ba && i_ba) delta = *i_ba - *c_ba;
    os << csv_field(ds) << ',' << csv_field(c_name) << ',' << num(c_ba) << ',' << csv_field(i_name) << ','
       << num(i_ba) << ',' << csv_field(n_name) << ',' << num(n_ba) << ',' << csv_field(t_name) << ',' << num(t_ba)
       << ',' << num(delta) << '\n';
  }
  return os.str();
}

std::string wilcoxon(const std::vector<json>& records) {
  const auto cls = best_by_dataset(records, "classical", "wilcoxon");
  const auto qi = best_by_dataset(records, "quantum-ideal", "wilcoxon");
  std::ostringstream os;
  os << "dataset,quantum,classical,mean_quantum,mean_classical,statistic,p_value,method,n_nonzero\n";
  for (const auto& [ds, q] : qi) {
    const auto it = cls.find(ds);
    if (it == cls.end()) continue;
    const auto a = need(*q, "fold_ba", "wilcoxon").get<std::vector<double>>();
    const auto b = need(*it->second, "fold_ba", "wilcoxon").get<std::vector<double>>();
    if (a.size() != b.size()) throw std::invalid_argument("report --mode wilcoxon: fold counts differ on " + ds);
    const TestReport t = wilcoxon_signed_rank(a, b);
    os << csv_field(ds) << ',' << csv_field(describe(*q)) << ',' << csv_field(describe(*it->second)) << ','
       << num(q->at("mean_ba").get<double>()) << ',' << num(it->second->at("mean_ba").get<double>()) << ','
       << num(t.statistic) << ',' << num(t.p_value) << ',' << t.method << ',' << t.n << '\n';
  }
  return os.str();
}

std::string friedman_report(const std::vector<json>& records) {
  // best mean BA per (kernel label, dataset)
  std::map<std::string, std::map<std::string, double>> score;
  for (const auto& r : records) {
    const std::string k = need(r, "kernel", "friedman").get<std::string>();
    const std::string ds = need(r, "dataset", "friedman").get<std::string>();
    const double ba = need(r, "mean_ba", "friedman").get<double>();
    auto& cell = score[k];
    const auto it = cell.find(ds);
    if (it == cell.end() || ba > it->second) cell[ds] = ba;
  }
  std::vector<std::string> methods;
  for (const auto& [k, v] : score) methods.push_back(k);
  std::vector<std::string> blocks;
  std::vector<std::string> dropped;
  for (const auto& ds : datasets_of(records, "friedman")) {
    bool complete = true;
    for (const auto& m : methods) complete = complete && score[m].count(ds) > 0;
    (complete ? blocks : dropped).push_back(ds);
  }
  if (methods.size() < 2 || blocks.size() < 2) {
    throw std::invalid_argument("report --mode friedman: need at least 2 kernels evaluated on at least 2 common datasets");
  }
  Eigen::MatrixXd S(static_cast<Eigen::Index>(methods.size()), static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = score[methods[i]][blocks[j]];
    }
  }
  const TestReport t = friedman(S);
  json out = {{"methods", methods},          {"datasets", blocks},      {"dropped_datasets", dropped},
              {"statistic", t.statistic},    {"p_value", t.p_value},    {"df", t.df ? json(*t.df) : json(nullptr)},
              {"mean_ranks", t.mean_ranks},  {"degenerate", t.degenerate}};
  if (methods.size() <= 20) {
    const NemenyiReport nr = nemenyi(t.mean_ranks, blocks.size());
    json pairs = json::array();
    for (const auto& p : nr.pairs) {
      pairs.push_back({{"a", methods[p.a]}, {"b", methods[p.b]}, {"rank_difference", p.rank_difference},
                       {"significant", p.significant}});
    }
    out["critical_difference"] = nr.critical_difference;
    out["nemenyi"] = pairs;
  }
  return out.dump(2) + "\n";
}

std::string factor_level(const json& r, const std::string& factor) {
  if (factor == "category") return record_category(r);
  if (factor == "dataset" || factor == "kernel" || factor == "reducer") return need(r, factor.c_str(), "factors").get<std::string>();
  if (factor == "k") return need(r, "k", "factors").dump();
  const json& cfg = need(r, "config", "factors");
  const json& kern = cfg.at("kernel");
  if (factor == "reps") return kern.contains("reps") ? kern.at("reps").dump() : "n/a";
  if (factor == "noise") return kern.contains("noise") ? kern.at("noise").dump() : "none";
  throw std::logic_error("unknown factor");
}

std::string factors(const std::vector<json>& records) {
  const std::vector<std::string> names = {"dataset", "category", "kernel", "reducer", "k", "reps", "noise"};
  std::ostringstream os;
  os << "factor,levels,n,H,df,p_value,epsilon_squared\n";
  for (const auto& f : names) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& r : records) groups[factor_level(r, f)].push_back(need(r, "mean_ba", "factors").get<double>());
    if (groups.size() < 2) continue;
    std::vector<std::vector<double>> g;
    for (auto& [level, v] : groups) g.push_back(v);
    const TestReport t = kruskal_wallis(g);
    os << f << ',' << groups.size() << ',' << t.n << ',' << num(t.statistic) << ',' << num(t.df) << ','
       << num(t.p_value) << ',' << num(t.effect_size) << '\n';
  }
  return os.str();
}

std::string spectra(const std::vector<json>& records) {
  std::ostringstream os;
  os << "dataset,kernel,reducer,k,effective_rank_ratio,top1_variance,top5_variance,diag_dominance,"
        "negative_eig_fraction,eigenvalues\n";
  for (const auto& r : records) {
    const json& folds = need(r, "folds", "spectra");
    if (folds.empty() || !folds.at(0).contains("spectrum") || folds.at(0).at("spectrum").is_null()) {
      throw std::invalid_argument("report --mode spectra: record lacks field 'folds[0].spectrum'");
    }
    const json& s = folds.at(0).at("spectrum");
    std::string eig;
    for (const auto& e : s.at("eigenvalues")) eig += (eig.empty() ? "" : ";") + num(e.get<double>());
    os << csv_field(r.at("dataset").get<std::string>()) << ',' << csv_field(r.at("kernel").get<std::string>()) << ','
       << r.value("reducer", "") << ',' << r.value("k", 0) << ',' << num(s.at("effective_rank_ratio").get<double>())
       << ',' << num(s.at("top1_variance").get<double>()) << ',' << num(s.at("top5_variance").get<double>()) << ','
       << num(s.at("diag_dominance").get<double>()) << ',' << num(s.at("negative_eig_fraction").get<double>()) << ','
       << eig << '\n';
  }
  return os.str();
}

std::string learning(const std::vector<json>& records) {
  std::ostringstream os;
  os << "dataset,kernel,category,reducer,k,fraction,mean_n_train,mean_ba,slope,slope_p\n";
  int used = 0;
  for (const auto& r : records) {
    if (!r.contains("learning_curve")) continue;
    ++used;
    const json& lc = r.at("learning_curve");
    std::string slope;
    std::string p;
    if (!lc.at("slope").is_null()) {
      slope = num(lc.at("slope").at("slope").get<double>());
      p = num(lc.at("slope").at("p_two_sided").get<double>());
    }
    for (const auto& pt : lc.at("points")) {
      os << csv_field(r.at("dataset").get<std::string>()) << ',' << csv_field(r.at("kernel").get<std::string>()) << ','
         << record_category(r) << ',' << r.value("reducer", "") << ',' << r.value("k", 0) << ','
         << num(pt.at("fraction").get<double>()) << ',' << num(pt.at("mean_n_train").get<double>()) << ','
         << (pt.at("mean_ba").is_null() ? "" : num(pt.at("mean_ba").get<double>())) << ',' << slope << ',' << p << '\n';
    }
  }
  if (used == 0) throw std::invalid_argument("report --mode learning: no record has field 'learning_curve'");
  return os.str();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string seeds(const std::vector<json>& records) {
  json configs = json::array();
  std::map<std::string, std::map<std::string, std::pair<double, const json*>>> best;  // dataset -> category
  for (const auto& r : records) {
    if (!r.contains("seed_sweep")) continue;
    const json& s = r.at("seed_sweep");
    const auto means = s.at("mean_ba").get<std::vector<double>>();
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    configs.push_back({{"dataset", r.at("dataset")}, {"kernel", r.at("kernel")}, {"category", record_category(r)},
                       {"cov", s.at("cov")}, {"mean", mean_of(means)}, {"range", *hi - *lo}, {"n_seeds", means.size()}});
    auto& slot = best[r.at("dataset").get<std::string>()][record_category(r)];
    if (!slot.second || mean_of(means) > slot.first) slot = {mean_of(means), &r};
  }
  if (configs.empty()) throw std::invalid_argument("report --mode seeds: no record has field 'seed_sweep'");
  json comparisons = json::array();
  for (const auto& [ds, cats] : best) {
    const auto q = cats.find("quantum-ideal");
    const auto c = cats.find("classical");
    if (q == cats.end() || c == cats.end()) continue;
    const auto a = q->second.second->at("seed_sweep").at("mean_ba").get<std::vector<double>>();
    const auto b = c->second.second->at("seed_sweep").at("mean_ba").get<std::vector<double>>();
    if (a.size() != b.size()) throw std::invalid_argument("report --mode seeds: seed counts differ on " + ds);
    int wins_q = 0;
    int wins_c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      wins_q += a[i] > b[i];
      wins_c += b[i] > a[i];
    }
    const TestReport t = wilcoxon_signed_rank(a, b);
    comparisons.push_back({{"dataset", ds},
                           {"quantum", describe(*q->second.second)},
                           {"classical", describe(*c->second.second)},
                           {"quantum_wins", wins_q},
                           {"classical_wins", wins_c},
                           {"wilcoxon_statistic", t.statistic},
                           {"p_value", t.p_value},
                           {"method", t.method},
                           {"degenerate", t.degenerate}});
  }
  return json({{"configs", configs}, {"comparisons", comparisons}}).dump(2) + "\n";
}

std::string suitability(const std::vector<json>& records) {
  std::vector<std::string> names;
  std::vector<double> gap;
  std::vector<double> delta;
  const bool direct = std::all_of(records.begin(), records.end(),
                                  [](const json& r) { return r.contains("nl_gap") && r.contains("delta"); });
  if (direct) {
    for (const auto& r : records) {
      names.push_back(r.value("dataset", ""));
      gap.push_back(r.at("nl_gap").get<double>());
      delta.push_back(r.at("delta").get<double>());
    }
  } else {
    const auto cls = best_by_dataset(records, "classical", "suitability");
    const auto qi = best_by_dataset(records, "quantum-ideal", "suitability");
    std::map<std::string, std::map<std::string, double>> by_kernel;
    for (const auto& r : records) {
      if (record_category(r) != "classical") continue;
      auto& m = by_kernel[r.at("dataset").get<std::string>()];
      const std::string k = r.at("kernel").get<std::string>();
      const double ba = r.at("mean_ba").get<double>();
      if (!m.count(k) || ba > m[k]) m[k] = ba;
    }
    for (const auto& [ds, q] : qi) {
      const auto c = cls.find(ds);
      const auto& m = by_kernel[ds];
      if (c == cls.end() || !m.count("rbf_scale") || !m.count("linear")) continue;
      names.push_back(ds);
      gap.push_back(m.at("rbf_scale") - m.at("linear"));
      delta.push_back(q->at("mean_ba").get<double>() - c->second->at("mean_ba").get<double>());
    }
  }
  if (names.size() < 3) {
    throw std::invalid_argument("report --mode suitability: need at least 3 datasets with rbf, linear and quantum-ideal records "
                                "(or records carrying 'nl_gap' and 'delta')");
  }
  const SpearmanResult s = spearman(gap, delta);
  json pairs = json::array();
  for (std::size_t i = 0; i < names.size(); ++i) pairs.push_back({{"dataset", names[i]}, {"nl_gap", gap[i]}, {"delta", delta[i]}});
  return json({{"pairs", pairs}, {"rho", s.rho}, {"p_value", s.p_value}, {"method", s.method}, {"n", names.size()}}).dump(2) +
         "\n";
}

std::string compare_kernels_report(const std::vector<json>& records) {
  std::ostringstream os;
  os << "label,n,r_ideal,mae_ideal,rmse_ideal,rel_frobenius_ideal,r_noisy,mae_noisy,ba_imported,ba_ideal,ba_noisy,"
        "best_C_imported,best_C_ideal,delta_pp,indefinite\n";
  for (const auto& r : records) {
    const json& vi = need(r, "vs_ideal", "compare-kernels");
    const json& sc = need(r, "scores", "compare-kernels");
    std::map<std::string, const json*> by;
    for (const auto& s : sc) by[s.at("source").get<std::string>()] = &s;
    auto ba = [&](const char* src) { return by.count(src) ? num(by[src]->at("mean_ba").get<double>()) : std::string(); };
    auto bc = [&](const char* src) { return by.count(src) ? num(by[src]->at("best_C").get<double>()) : std::string(); };
    const bool noisy = r.contains("vs_noisy") && !r.at("vs_noisy").is_null();
    os << csv_field(r.value("label", "")) << ',' << r.value("n", 0) << ',' << num(vi.at("pearson_r").get<double>()) << ','
       << num(vi.at("mae").get<double>()) << ',' << num(vi.at("rmse").get<double>()) << ','
       << num(vi.at("rel_frobenius").get<double>()) << ','
       << (noisy ? num(r.at("vs_noisy").at("pearson_r").get<double>()) : "") << ','
       << (noisy ? num(r.at("vs_noisy").at("mae").get<double>()) : "") << ',' << ba("imported") << ',' << ba("ideal")
       << ',' << ba("noisy") << ',' << bc("imported") << ',' << bc("ideal") << ','
       << num(need(r, "delta_pp", "compare-kernels").get<double>()) << ',' << r.value("imported_indefinite", false)
       << '\n';
  }
  return os.str();
}

}  // namespace

std::string record_category(const json& r) {
  const std::string family = r.value("family", "");
  if (family == "classical") return "classical";
  if (r.value("qkt", false)) return "qkt";
  return r.value("noisy", false) ? "quantum-noisy" : "quantum-ideal";
}

std::vector<std::string> report_modes() {
  return {"summary", "wilcoxon", "friedman", "factors", "spectra", "learning", "seeds", "suitability", "compare-kernels"};
}

std::string make_report(const std::vector<json>& records, std::string_view mode) {
  if (records.empty()) throw std::invalid_argument("report: no records in input");
  if (mode == "summary") return summary(records);
  if (mode == "wilcoxon") return wilcoxon(records);
  if (mode == "friedman") return friedman_report(records);
  if (mode == "factors") return factors(records);
  if (mode == "spectra") return spectra(records);
  if (mode == "learning") return learning(records);
  if (mode == "seeds") return seeds(records);
  if (mode == "suitability") return suitability(records);
  if (mode == "compare-kernels") return compare_kernels_report(records);
  throw std::invalid_argument("report: unknown mode '" + std::string(mode) + "'");
}

}  // namespace qkb
