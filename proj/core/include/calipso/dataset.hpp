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
#include <vector>

#include "calipso/types.hpp"

namespace calipso {

/// Line-delimited dataset format: one JSON scene record per line, each
/// carrying the vocabulary hash; readers reject records whose hash does not
/// match the vocabulary they were given.
void write_dataset(const std::string& path, const std::vector<Scene>& scenes,
                   const VerbVocabulary& vocabulary);
std::vector<Scene> read_dataset(const std::string& path, const VerbVocabulary& vocabulary);

std::string scene_to_json_line(const Scene& scene, std::uint64_t vocab_hash);
Scene scene_from_json_line(const std::string& line, std::uint64_t expected_vocab_hash);

/// Sidecar vocabulary file: verb names and targetless flags.
void write_vocabulary(const std::string& path, const VerbVocabulary& vocabulary);
VerbVocabulary read_vocabulary(const std::string& path);

/// Per-scene detector outputs, one JSON record per line.
struct ScenePredictions {
  int scene_index = 0;
  std::vector<ScoredTriplet> predictions;
};

void write_predictions(const std::string& path, const std::vector<ScenePredictions>& predictions,
                       const VerbVocabulary& vocabulary);
std::vector<ScenePredictions> read_predictions(const std::string& path);

}  // namespace calipso
