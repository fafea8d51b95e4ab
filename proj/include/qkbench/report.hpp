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

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace qkb {

/// Report modes over JSONL result records. Tabular modes return CSV text,
/// friedman / seeds / suitability return a JSON document.
///
///   summary          best classical / quantum-ideal / quantum-noisy / qkt per dataset, delta
///   wilcoxon         per dataset: best quantum-ideal vs best classical on fold BAs
///   friedman         kernels x datasets, with Nemenyi critical difference
///   factors          Kruskal-Wallis of mean BA per experimental factor, epsilon^2
///   spectra          spectral profile of each record's first-fold train kernel
///   learning         per-fraction BA and OLS slope on ln(n_train)
///   seeds            seed-sweep CoV per record and paired quantum/classical comparison
///   suitability      Spearman between non-linearity gap and quantum delta per dataset
///   compare-kernels  hardware-comparison reports as a flat table
///
/// Throws std::invalid_argument for empty input, unknown modes, or records
/// lacking a field the mode needs (the field is named).
std::string make_report(const std::vector<nlohmann::json>& records, std::string_view mode);

std::vector<std::string> report_modes();

/// "classical", "quantum-ideal", "quantum-noisy" or "qkt".
std::string record_category(const nlohmann::json& record);

}  // namespace qkb
