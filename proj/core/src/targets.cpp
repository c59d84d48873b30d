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

#include "calipso/net/targets.hpp"

namespace calipso::net {

TrainingTargets build_training_targets(const Scene& scene, const AnchorGrid& grid,
                                       const AnchorAssignment& assignment,
                                       const VerbVocabulary& vocabulary,
                                       const EquivalenceOptions& options) {
  const int V = vocabulary.size();
  const int n_boxes = static_cast<int>(scene.boxes.size());

  std::vector<std::vector<std::uint8_t>> active(n_boxes, std::vector<std::uint8_t>(V, 0));
  std::vector<std::vector<std::uint8_t>> passive(n_boxes, std::vector<std::uint8_t>(V, 0));
  std::vector<std::vector<std::uint8_t>> presence(n_boxes, std::vector<std::uint8_t>(2 * V, 0));

  for (const auto& t : scene.triplets) {
    active[t.subject_index][t.verb_id] = 1;
    if (t.target_index) {
      passive[*t.target_index][t.verb_id] = 1;
      presence[t.subject_index][2 * t.verb_id + 0] = 1;  // role 0: direct object
    }
  }

  TrainingTargets out;
  for (int anchor : assignment.assigned) {
    const int box = assignment.box_of_anchor[anchor];
    const AnchorLocation loc = grid.locate(anchor);
    AnchorRef ref{anchor, loc.level_index, loc.x, loc.y, loc.shape};

    VerbLabels vl;
    vl.at = ref;
    vl.active = active[box];
    vl.passive = passive[box];
    out.verb_labels.push_back(std::move(vl));

    if (scene.boxes[box].class_id == scene.human_class_id) {
      TargetLabels tl;
      tl.at = ref;
      tl.presence = presence[box];
      out.target_labels.push_back(std::move(tl));
    }
  }
  out.classes = build_equivalence_classes(assignment, scene.triplets, vocabulary, options);
  return out;
}

std::map<int, std::set<int>> usual_targets_from_scenes(const std::vector<Scene>& scenes) {
  std::map<int, std::set<int>> out;
  for (const auto& scene : scenes)
    for (const auto& t : scene.triplets)
      if (t.target_index) out[t.verb_id].insert(scene.boxes[*t.target_index].class_id);
  return out;
}

VerbEmbeddingGather gather_verb_embeddings(const DenseOutputs& dense, const AnchorGrid& grid,
                                           const AnchorAssignment& assignment,
                                           const std::vector<Box>& boxes,
                                           const std::vector<AnchorClass>& verb_classes,
                                           int verb_id) {
  VerbEmbeddingGather out;
  EmbeddingBatch& b = out.batch;
  b.dim = dense.levels.empty() ? 0 : dense.levels.front().embedding_dim;

  std::vector<float> tmp(b.dim);
  for (const auto& cls : verb_classes) {
    std::vector<int> rows;
    for (int anchor : cls.anchors) {
      const AnchorLocation loc = grid.locate(anchor);
      const DenseLevel& lev = dense.levels[loc.level_index];
      lev.embedding(loc.x, loc.y, loc.shape, verb_id, tmp.data());
      const int row = b.n_rows();
      for (int t = 0; t < b.dim; ++t) b.rows.push_back(tmp[t]);
      const int box = assignment.box_of_anchor[anchor];
      b.box_of_row.push_back(box);
      b.label_of_row.push_back(boxes[box].class_id);
      out.refs.push_back({anchor, loc.level_index, loc.x, loc.y, loc.shape});
      rows.push_back(row);
    }
    b.classes.push_back(std::move(rows));
    b.interacting.push_back(cls.interacting);
  }
  return out;
}

void scatter_embedding_grads(const VerbEmbeddingGather& gather,
                             const std::vector<double>& row_grads, int verb_id, double scale,
                             const DenseOutputs& dense, DenseGrads& grads) {
  const int T = gather.batch.dim;
  for (std::size_t r = 0; r < gather.refs.size(); ++r) {
    const AnchorRef& ref = gather.refs[r];
    const DenseLevel& lev = dense.levels[ref.level_index];
    const int base = ref.shape * lev.verbs * T + verb_id * T;
    for (int t = 0; t < T; ++t)
      grads.levels[ref.level_index].embeddings[lev.idx(base + t, ref.x, ref.y)] +=
          static_cast<float>(scale * row_grads[r * T + t]);
  }
}

}  // namespace calipso::net
