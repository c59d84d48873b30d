// Copyright 2026 The Calipso Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "calipso/ablation.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace calipso {

std::vector<AblationVariant> default_ablation_matrix() {
  std::vector<AblationVariant> m;
  m.push_back({"full"});
  m.push_back({"no-passive", /*passive*/ false, true, true, 0});
  m.push_back({"no-target-presence", true, /*target*/ false, true, 0});
  m.push_back({"no-weight-sharing", true, true, /*share*/ false, 0});
  return m;
}

std::vector<AblationRow> run_ablation(
    const net::NetworkConfig& base, const std::vector<AblationVariant>& variants,
    const std::vector<Scene>& train_scenes, const std::vector<Scene>& eval_scenes,
    const VerbVocabulary& vocabulary, const AnchorGridConfig& grid_config,
    const net::TrainConfig& train_config, const InferenceOptions& inference_options,
    const std::vector<std::uint64_t>& seeds,
    const std::function<void(const std::string&, std::uint64_t, double)>& on_result) {
  std::vector<AblationRow> rows;
  for (const auto& variant : variants) {
    AblationRow row;
    row.variant = variant.name;
    const net::NetworkConfig cfg = variant.apply(base);
    for (std::uint64_t seed : seeds) {
      net::InteractionModel model(cfg, seed);
      net::TrainConfig tc = train_config;
      tc.seed = seed;
      train_model(model, train_scenes, vocabulary, grid_config, tc);
      const ApResult ap =
          evaluate_model(model, eval_scenes, vocabulary, grid_config, inference_options);
      row.per_seed_ap.push_back(ap.mean);
      if (on_result) on_result(variant.name, seed, ap.mean);
    }
    double sum = 0;
    for (double a : row.per_seed_ap) sum += a;
    row.mean = sum / row.per_seed_ap.size();
    double var = 0;
    for (double a : row.per_seed_ap) var += (a - row.mean) * (a - row.mean);
    row.stddev = row.per_seed_ap.size() > 1 ? std::sqrt(var / (row.per_seed_ap.size() - 1)) : 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "variant" << std::right << std::setw(10) << "mean AP"
      << std::setw(10) << "stddev" << "  per-seed\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(24) << r.variant << std::right << std::fixed
        << std::setprecision(4) << std::setw(10) << r.mean << std::setw(10) << r.stddev << "  ";
    for (double a : r.per_seed_ap) out << std::setprecision(4) << a << " ";
    out << "\n";
  }
  return out.str();
}

}  // namespace calipso
