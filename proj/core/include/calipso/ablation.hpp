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

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "calipso/eval.hpp"
#include "calipso/net/train.hpp"

namespace calipso {

/// One ablation axis: a named delta on the base network configuration.
struct AblationVariant {
  std::string name;
  bool passive_head = true;
  bool target_head = true;
  bool share_weights = true;
  int blocks = 0;  // 0 keeps the base depth

  net::NetworkConfig apply(net::NetworkConfig base) const {
    base.passive_head_enabled = passive_head;
    base.target_head_enabled = target_head;
    base.share_weights_across_levels = share_weights;
    if (blocks > 0) base.blocks = blocks;
    return base;
  }
};

/// The default matrix: full model plus one row per removed component.
std::vector<AblationVariant> default_ablation_matrix();

struct AblationRow {
  std::string variant;
  std::vector<double> per_seed_ap;
  double mean = 0;
  double stddev = 0;
};

/// Trains and evaluates each variant once per seed.
std::vector<AblationRow> run_ablation(
    const net::NetworkConfig& base, const std::vector<AblationVariant>& variants,
    const std::vector<Scene>& train_scenes, const std::vector<Scene>& eval_scenes,
    const VerbVocabulary& vocabulary, const AnchorGridConfig& grid_config,
    const net::TrainConfig& train_config, const InferenceOptions& inference_options,
    const std::vector<std::uint64_t>& seeds,
    const std::function<void(const std::string&, std::uint64_t, double)>& on_result = {});

std::string format_ablation_table(const std::vector<AblationRow>& rows);

}  // namespace calipso
