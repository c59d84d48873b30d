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

#include <map>
#include <set>
#include <vector>

#include "calipso/anchors.hpp"
#include "calipso/losses.hpp"
#include "calipso/types.hpp"

namespace calipso::net {

/// Per-anchor training labels plus the per-verb anchor partition.
/// Subject anchors carry active verb labels, target anchors passive ones;
/// human anchors additionally carry target-presence labels (role 0 is the
/// direct-object role; role 1 is reserved and stays zero here).
struct TrainingTargets {
  std::vector<VerbLabels> verb_labels;
  std::vector<TargetLabels> target_labels;
  EquivalenceClasses classes;
};

TrainingTargets build_training_targets(const Scene& scene, const AnchorGrid& grid,
                                       const AnchorAssignment& assignment,
                                       const VerbVocabulary& vocabulary,
                                       const EquivalenceOptions& options = {});

/// The usual-target sets: class c belongs to a verb's set iff c appears as
/// that verb's target at least once in the given scenes.
std::map<int, std::set<int>> usual_targets_from_scenes(const std::vector<Scene>& scenes);

/// Embedding rows of one verb's partition gathered from the dense maps,
/// with the anchor coordinates kept for scattering gradients back.
struct VerbEmbeddingGather {
  EmbeddingBatch batch;
  std::vector<AnchorRef> refs;  // one per batch row
};

VerbEmbeddingGather gather_verb_embeddings(const DenseOutputs& dense, const AnchorGrid& grid,
                                           const AnchorAssignment& assignment,
                                           const std::vector<Box>& boxes,
                                           const std::vector<AnchorClass>& verb_classes,
                                           int verb_id);

/// Adds `scale * row_grads` into the dense embedding gradient maps.
void scatter_embedding_grads(const VerbEmbeddingGather& gather,
                             const std::vector<double>& row_grads, int verb_id, double scale,
                             const DenseOutputs& dense, DenseGrads& grads);

}  // namespace calipso::net
