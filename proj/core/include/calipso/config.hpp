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

#include <string>

#include "json.hpp"

#include "calipso/anchors.hpp"
#include "calipso/inference.hpp"
#include "calipso/net/train.hpp"
#include "calipso/synth.hpp"

namespace calipso {

/// Whole-run configuration tree; every CLI subcommand reads a subset.
/// Parsing rejects unknown keys anywhere in the tree.
struct RunConfig {
  synth::SceneGenConfig scene_gen;
  net::NetworkConfig network;
  AnchorGridConfig anchors;
  net::TrainConfig train;
  InferenceOptions inference;

  /// Cross-section consistency (verb counts, anchor counts, level ranges).
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const net::NetworkConfig& config);
net::NetworkConfig network_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnchorGridConfig& config);
AnchorGridConfig anchor_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VerbVocabulary& vocabulary);
VerbVocabulary vocabulary_from_json(const nlohmann::json& j);

RunConfig load_run_config(const std::string& path);

/// Applies one "dotted.path=value" override onto a config JSON tree.
/// Values parse as JSON when possible and fall back to strings.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Stable hash of a config JSON (sorted keys, compact dump).
std::uint64_t config_hash(const nlohmann::json& j);

}  // namespace calipso
