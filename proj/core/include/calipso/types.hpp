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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace calipso {

/// Axis-aligned box in pixel coordinates, half-open semantics are not
/// assumed; area is (x_max-x_min)*(y_max-y_min).
struct Box {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  int class_id = -1;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
};

/// One interaction instance: subject box index, verb id, and an optional
/// target box index. Targetless verbs never carry a target.
struct InteractionTriplet {
  int subject_index = -1;
  int verb_id = -1;
  std::optional<int> target_index;
};

struct Verb {
  std::string name;
  bool targetless = false;
};

/// Ordered verb list; verb ids are positions in this list.
class VerbVocabulary {
 public:
  VerbVocabulary() = default;
  explicit VerbVocabulary(std::vector<Verb> verbs);

  int size() const { return static_cast<int>(verbs_.size()); }
  const Verb& verb(int id) const { return verbs_.at(id); }
  const std::vector<Verb>& verbs() const { return verbs_; }
  int find(const std::string& name) const;  // -1 if absent
  bool targetless(int id) const { return verbs_.at(id).targetless; }

  /// Stable content hash, embedded in dataset records so that scenes and
  /// vocabularies cannot be mixed accidentally.
  std::uint64_t hash() const;

 private:
  std::vector<Verb> verbs_;
};

/// Raster image, row-major, interleaved channels (HWC), 8-bit.
struct Image {
  int width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// One labeled sample: raster, ground-truth boxes, interaction triplets.
struct Scene {
  Image image;
  std::vector<Box> boxes;
  std::vector<InteractionTriplet> triplets;
  int human_class_id = 0;
};

struct SceneViolation {
  std::string field;   // e.g. "boxes[2].x_min"
  std::string detail;  // rule broken
};

/// Checks every Scene invariant; returns one entry per violation and never
/// throws. An empty result means the scene is well formed.
std::vector<SceneViolation> validate_scene(const Scene& scene,
                                           const VerbVocabulary& vocabulary);

enum class PredictionKind { kTriplet, kPair };

/// Final output unit of the detector: subject, verb, optional target, score.
struct ScoredTriplet {
  Box subject;
  int verb_id = -1;
  std::optional<Box> target;
  double score = 0.0;
  PredictionKind kind = PredictionKind::kTriplet;
};

/// Per-level dense prediction maps. Score maps are channel-planar:
/// index(c, y, x) = c*H*W + y*W + x with c = anchor*channels_per_anchor + ch.
/// Verb channels per anchor: V active then V passive (when enabled).
/// Target channels per anchor: 2 roles per verb, ch = 2*verb + role.
/// Embedding channels per anchor: verb*T + t.
struct DenseLevel {
  int level = 0;         // pyramid level l, stride 2^l
  int width = 0;         // W_l
  int height = 0;        // H_l
  int anchors = 0;       // A
  int verbs = 0;         // V
  int embedding_dim = 0; // T
  bool passive_enabled = true;
  bool target_enabled = true;

  std::vector<float> verb_scores;    // [A * (passive? 2V : V)] x H x W
  std::vector<float> target_scores;  // [A * 2V] x H x W, empty if disabled
  std::vector<float> embeddings;     // [A * V * T] x H x W

  int verb_channels_per_anchor() const { return passive_enabled ? 2 * verbs : verbs; }
  std::size_t plane() const { return static_cast<std::size_t>(width) * height; }
  std::size_t idx(int channel, int x, int y) const {
    return static_cast<std::size_t>(channel) * plane() + static_cast<std::size_t>(y) * width + x;
  }

  float active_score(int x, int y, int a, int v) const {
    return verb_scores[idx(a * verb_channels_per_anchor() + v, x, y)];
  }
  float passive_score(int x, int y, int a, int v) const {
    return verb_scores[idx(a * verb_channels_per_anchor() + verbs + v, x, y)];
  }
  float target_score(int x, int y, int a, int v, int role) const {
    return target_scores[idx(a * 2 * verbs + 2 * v + role, x, y)];
  }
  void embedding(int x, int y, int a, int v, float* out) const {
    const int base = a * verbs * embedding_dim + v * embedding_dim;
    for (int t = 0; t < embedding_dim; ++t) out[t] = embeddings[idx(base + t, x, y)];
  }
};

/// Dense multi-task outputs of one forward pass over one image.
struct DenseOutputs {
  std::vector<DenseLevel> levels;
  std::uint64_t forward_ops = 0;  // multiply-accumulate count of the pass
};

/// Feature-map side at pyramid level l for an image extent of `size` pixels.
inline int level_extent(int size, int level) { return size >> level; }

}  // namespace calipso
