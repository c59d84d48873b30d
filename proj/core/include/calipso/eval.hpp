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
#include <vector>

#include "calipso/dataset.hpp"
#include "calipso/inference.hpp"
#include "calipso/types.hpp"

namespace calipso {

/// Role-matching rule: a prediction counts when the verb matches and the
/// subject box (and the target box, for targeted triplets) overlaps its
/// ground-truth counterpart with IoU strictly above the threshold. Pair
/// predictions match targetless ground truth on the subject box alone.
struct MatchCriterion {
  double iou_threshold = 0.5;
  bool require_verb_match = true;
};

struct ApResult {
  std::map<int, double> per_verb;  // only verbs with ground-truth instances
  double mean = 0.0;
};

/// Average precision per verb with all-point interpolation; predictions are
/// sorted by descending score (stable in input order on ties) and matched
/// greedily, each ground-truth triplet at most once. Verbs without ground
/// truth are excluded from the mean.
ApResult ap_role(const std::vector<ScenePredictions>& predictions,
                 const std::vector<Scene>& ground_truth, const VerbVocabulary& vocabulary,
                 const MatchCriterion& criterion = {});

/// Detect-then-score convenience: runs the detector adapter and the model on
/// every scene and reports mean AP. Used by the CLI and the ablation harness.
ApResult evaluate_model(net::InteractionModel& model, const std::vector<Scene>& scenes,
                        const VerbVocabulary& vocabulary, const AnchorGridConfig& grid_config,
                        const InferenceOptions& options = {},
                        const DetectorAdapter& detector = {},
                        std::vector<ScenePredictions>* out_predictions = nullptr);

}  // namespace calipso
