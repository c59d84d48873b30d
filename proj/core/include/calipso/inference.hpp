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

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "calipso/anchors.hpp"
#include "calipso/net/model.hpp"
#include "calipso/types.hpp"

namespace calipso {

/// External-detector output for one object.
struct Detection {
  Box box;
  int class_id = -1;
  double score = 1.0;  // s^det in [0,1]
};

/// Stand-in for the external detector: perfect ground truth, a simulated
/// noisy detector, or detections imported from a file.
struct DetectorAdapter {
  enum class Mode { kGroundTruth, kNoisySimulated, kExternalImport };
  Mode mode = Mode::kGroundTruth;

  // Noise parameters for the simulated mode.
  double drop_rate = 0.1;
  double jitter = 0.05;          // box corner noise, fraction of box size
  double misclass_rate = 0.05;   // chance of flipping to another object class
  double score_floor = 0.6;      // simulated scores drawn from [floor, 1]
  std::uint64_t seed = 1;
  std::vector<Detection> imported;  // used by kExternalImport

  std::vector<Detection> detect(const Scene& scene, std::mt19937_64& rng) const;
};

struct BoxToAnchor {
  int anchor = -1;
  double iou = 0.0;  // of the winning anchor; low values flag poor coverage
};

/// Argmax-IoU anchor for a box, over every level; ties resolve to the lowest
/// level, then the lowest flat index. An argmax always exists.
BoxToAnchor map_box_to_anchor(const Box& box, const AnchorGrid& grid);

enum class EmbeddingNorm { kL2, kL1 };

/// Connection score between two embeddings: exp(-distance), in (0,1].
double connection_score(const std::vector<double>& e_h, const std::vector<double>& e_o,
                        EmbeddingNorm norm = EmbeddingNorm::kL2);

/// Geometric mean of the six triplet factors.
double triplet_score(double s_h_det, double s_active, double s_o_det, double s_passive,
                     double s_target, double s_emb);

/// Cube root of s_h_det * s_active * (1 - s_target), for the no-target case.
double pair_score(double s_h_det, double s_active, double s_target);

struct InferenceOptions {
  double threshold = 0.05;
  EmbeddingNorm norm = EmbeddingNorm::kL2;
  double low_iou_flag = 0.2;  // mappings under this IoU are counted as poor
  int target_role = 0;        // target-presence role channel read at inference
  int human_class_id = 0;     // detections of this class act as subjects
};

/// Diagnostics of one detection pass; also the evidence for the
/// constant-cost claim (one forward pass, local readout).
struct InferenceStats {
  int forward_passes = 0;
  std::uint64_t forward_ops = 0;
  std::vector<int> touched_anchors;  // unique anchors read, ascending
  int low_iou_mappings = 0;
  std::uint64_t score_evaluations = 0;
};

/// Full single-shot inference: one forward pass over the image, anchor-grid
/// readout for each detection, per-(human, verb) argmax over all triplet
/// candidates plus the pair, thresholded. At most one output per
/// (human, verb).
std::vector<ScoredTriplet> detect_interactions(net::InteractionModel& model, const Image& image,
                                               const std::vector<Detection>& detections,
                                               const VerbVocabulary& vocabulary,
                                               const AnchorGridConfig& grid_config,
                                               const InferenceOptions& options = {},
                                               InferenceStats* stats = nullptr);

/// Readout-and-scoring stage on precomputed dense maps (exposed for tests
/// and for reuse by the evaluation harness).
std::vector<ScoredTriplet> score_detections(const DenseOutputs& dense, const AnchorGrid& grid,
                                            const std::vector<Detection>& detections,
                                            const VerbVocabulary& vocabulary,
                                            const InferenceOptions& options = {},
                                            InferenceStats* stats = nullptr);

}  // namespace calipso
