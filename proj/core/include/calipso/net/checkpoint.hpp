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

#include <memory>
#include <string>

#include "calipso/anchors.hpp"
#include "calipso/net/model.hpp"
#include "calipso/types.hpp"

namespace calipso::net {

/// Versioned checkpoint: config echo (network, anchors, vocabulary) plus the
/// parameter arrays, each guarded by a content hash. Loading refuses files
/// whose stored config hash does not match the recomputed one.
void save_checkpoint(const std::string& path, InteractionModel& model,
                     const AnchorGridConfig& anchor_config, const VerbVocabulary& vocabulary);

struct LoadedCheckpoint {
  NetworkConfig network;
  AnchorGridConfig anchors;
  VerbVocabulary vocabulary;
  std::unique_ptr<InteractionModel> model;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace calipso::net
