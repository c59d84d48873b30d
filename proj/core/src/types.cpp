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

#include "calipso/types.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "calipso/hash.hpp"

namespace calipso {

VerbVocabulary::VerbVocabulary(std::vector<Verb> verbs) : verbs_(std::move(verbs)) {
  if (verbs_.empty()) throw std::invalid_argument("vocabulary requires at least one verb");
  std::unordered_set<std::string> seen;
  for (const auto& v : verbs_) {
    if (!seen.insert(v.name).second)
      throw std::invalid_argument("duplicate verb name: " + v.name);
  }
}

int VerbVocabulary::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (verbs_[i].name == name) return i;
  return -1;
}

std::uint64_t VerbVocabulary::hash() const {
  Fnv1a64 h;
  for (const auto& v : verbs_) {
    h.update(v.name.data(), v.name.size());
    const char flag = v.targetless ? 'T' : 't';
    h.update(&flag, 1);
  }
  return h.value();
}

std::vector<SceneViolation> validate_scene(const Scene& scene,
                                           const VerbVocabulary& vocabulary) {
  std::vector<SceneViolation> out;
  const int n_boxes = static_cast<int>(scene.boxes.size());

  for (int i = 0; i < n_boxes; ++i) {
    const Box& b = scene.boxes[i];
    const std::string at = "boxes[" + std::to_string(i) + "]";
    if (!std::isfinite(b.x_min) || !std::isfinite(b.y_min) || !std::isfinite(b.x_max) ||
        !std::isfinite(b.y_max))
      out.push_back({at, "coordinates must be finite"});
    if (!(b.x_min < b.x_max)) out.push_back({at + ".x_min", "x_min must be less than x_max"});
    if (!(b.y_min < b.y_max)) out.push_back({at + ".y_min", "y_min must be less than y_max"});
  }

  for (int i = 0; i < static_cast<int>(scene.triplets.size()); ++i) {
    const InteractionTriplet& t = scene.triplets[i];
    const std::string at = "triplets[" + std::to_string(i) + "]";
    if (t.subject_index < 0 || t.subject_index >= n_boxes) {
      out.push_back({at + ".subject_index", "index out of range"});
      continue;
    }
    if (scene.boxes[t.subject_index].class_id != scene.human_class_id)
      out.push_back({at + ".subject_index", "subject box must have the human class"});
    if (t.verb_id < 0 || t.verb_id >= vocabulary.size()) {
      out.push_back({at + ".verb_id", "verb id outside vocabulary"});
      continue;
    }
    if (t.target_index) {
      if (*t.target_index < 0 || *t.target_index >= n_boxes)
        out.push_back({at + ".target_index", "index out of range"});
      else if (*t.target_index == t.subject_index)
        out.push_back({at + ".target_index", "self-interaction: subject equals target"});
      else if (scene.boxes[*t.target_index].class_id == scene.human_class_id)
        out.push_back({at + ".target_index", "humans may not be targets"});
      if (vocabulary.targetless(t.verb_id))
        out.push_back({at + ".target_index",
                       "targetless verb '" + vocabulary.verb(t.verb_id).name +
                           "' must not carry a target"});
    }
  }
  return out;
}

}  // namespace calipso
