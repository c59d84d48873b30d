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

#include "calipso/eval.hpp"

#include <algorithm>
#include <cmath>

namespace calipso {

namespace {

struct FlatPrediction {
  int scene = 0;
  double score = 0;
  const ScoredTriplet* pred = nullptr;
};

bool matches(const ScoredTriplet& pred, const InteractionTriplet& gt, const Scene& scene,
             const MatchCriterion& criterion) {
  if (criterion.require_verb_match && pred.verb_id != gt.verb_id) return false;
  if (iou(pred.subject, scene.boxes[gt.subject_index]) <= criterion.iou_threshold) return false;
  const bool gt_targeted = gt.target_index.has_value();
  const bool pred_targeted = pred.kind == PredictionKind::kTriplet && pred.target.has_value();
  if (gt_targeted != pred_targeted) return false;
  if (gt_targeted &&
      iou(*pred.target, scene.boxes[*gt.target_index]) <= criterion.iou_threshold)
    return false;
  return true;
}

}  // namespace

ApResult ap_role(const std::vector<ScenePredictions>& predictions,
                 const std::vector<Scene>& ground_truth, const VerbVocabulary& vocabulary,
                 const MatchCriterion& criterion) {
  ApResult result;

  for (int v = 0; v < vocabulary.size(); ++v) {
    // Ground-truth instances of this verb, per scene.
    std::size_t n_gt = 0;
    std::vector<std::vector<int>> gt_index(ground_truth.size());
    for (std::size_t s = 0; s < ground_truth.size(); ++s)
      for (int t = 0; t < static_cast<int>(ground_truth[s].triplets.size()); ++t)
        if (ground_truth[s].triplets[t].verb_id == v) {
          gt_index[s].push_back(t);
          ++n_gt;
        }
    if (n_gt == 0) continue;  // verb excluded from the mean

    std::vector<FlatPrediction> flat;
    for (const auto& sp : predictions) {
      if (sp.scene_index < 0 || sp.scene_index >= static_cast<int>(ground_truth.size())) continue;
      for (const auto& p : sp.predictions)
        if (p.verb_id == v) flat.push_back({sp.scene_index, p.score, &p});
    }
    std::stable_sort(flat.begin(), flat.end(),
                     [](const FlatPrediction& a, const FlatPrediction& b) {
                       return a.score > b.score;
                     });

    std::vector<std::vector<bool>> used(ground_truth.size());
    for (std::size_t s = 0; s < ground_truth.size(); ++s)
      used[s].assign(gt_index[s].size(), false);

    std::vector<double> precision, recall;
    std::size_t tp = 0;
    for (std::size_t k = 0; k < flat.size(); ++k) {
      const Scene& scene = ground_truth[flat[k].scene];
      const auto& candidates = gt_index[flat[k].scene];
      // Best unmatched candidate: maximal worst-box IoU, ties to lowest index.
      int best = -1;
      double best_quality = -1;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (used[flat[k].scene][c]) continue;
        const InteractionTriplet& gt = scene.triplets[candidates[c]];
        if (!matches(*flat[k].pred, gt, scene, criterion)) continue;
        double quality = iou(flat[k].pred->subject, scene.boxes[gt.subject_index]);
        if (gt.target_index)
          quality =
              std::min(quality, iou(*flat[k].pred->target, scene.boxes[*gt.target_index]));
        if (quality > best_quality) {
          best_quality = quality;
          best = static_cast<int>(c);
        }
      }
      if (best >= 0) {
        used[flat[k].scene][best] = true;
        ++tp;
      }
      precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
      recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    }

    // All-point interpolation: running max of precision from the right.
    double ap = 0;
    double max_prec = 0;
    double prev_recall = 0;
    std::vector<std::pair<double, double>> pr;  // (recall, interpolated precision)
    for (int k = static_cast<int>(precision.size()) - 1; k >= 0; --k) {
      max_prec = std::max(max_prec, precision[k]);
      pr.push_back({recall[k], max_prec});
    }
    std::reverse(pr.begin(), pr.end());
    for (const auto& [r, p] : pr) {
      ap += (r - prev_recall) * p;
      prev_recall = r;
    }
    result.per_verb[v] = ap;
  }

  double sum = 0;
  for (const auto& [v, ap] : result.per_verb) sum += ap;
  result.mean = result.per_verb.empty() ? 0.0 : sum / result.per_verb.size();
  return result;
}

ApResult evaluate_model(net::InteractionModel& model, const std::vector<Scene>& scenes,
                        const VerbVocabulary& vocabulary, const AnchorGridConfig& grid_config,
                        const InferenceOptions& options, const DetectorAdapter& detector,
                        std::vector<ScenePredictions>* out_predictions) {
  std::vector<ScenePredictions> predictions;
  std::mt19937_64 det_rng(detector.seed);
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    ScenePredictions sp;
    sp.scene_index = static_cast<int>(i);
    const auto detections = detector.detect(scenes[i], det_rng);
    sp.predictions = detect_interactions(model, scenes[i].image, detections, vocabulary,
                                         grid_config, options);
    predictions.push_back(std::move(sp));
  }
  const ApResult result = ap_role(predictions, scenes, vocabulary);
  if (out_predictions) *out_predictions = std::move(predictions);
  return result;
}

}  // namespace calipso
