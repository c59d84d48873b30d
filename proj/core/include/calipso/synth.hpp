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

#include <optional>
#include <random>
#include <vector>

#include "calipso/types.hpp"

namespace calipso::synth {

/// Object classes rendered by the generator. Class 0 is the human subject.
enum ObjectClass : int {
  kHuman = 0,
  kCup = 1,
  kChair = 2,
  kBall = 3,
  kScreen = 4,
};

/// Crisp geometric predicates defining each targeted verb; the generator and
/// its test oracle share them, so emitted labels are exact by construction.
struct GeometryRules {
  double hold_gap_max = 3.0;    // box gap; the target also sits at carry height
  double sit_dx_frac = 0.35;    // |cx offset| limit as a fraction of seat width
  double sit_drop_min = -2.0;   // human bottom minus seat top, lower bound
  double sit_drop_frac = 0.35;  // ... upper bound as a fraction of seat height
  double look_cone_deg = 16.0;
  double look_min_dist = 26.0;
  double look_max_dist = 56.0;
  double throw_cone_deg = 10.0;
  double throw_min_dist = 62.0;
  double throw_max_dist = 100.0;
};

/// Verb ids of the default vocabulary.
enum DefaultVerb : int {
  kHold = 0,
  kSitOn = 1,
  kLookAt = 2,
  kThrowTo = 3,
  kStand = 4,
  kWalk = 5,
};

VerbVocabulary default_vocabulary();

struct SceneGenConfig {
  int image_width = 128;
  int image_height = 128;
  int image_channels = 3;

  int humans_min = 1;
  int humans_max = 2;

  // Per-human verb probabilities; stand/walk/sit are the mutually exclusive
  // locomotion states (stand takes the remainder).
  double p_hold = 0.55;
  double p_look = 0.50;
  double p_throw = 0.35;
  double p_sit = 0.30;
  double p_walk = 0.35;

  double distractor_rate = 0.5;  // chance of each distractor slot being used
  int max_distractors = 3;
  double shared_target_rate = 0.3;  // later humans may hold an already-held object

  GeometryRules rules;
  double min_separation = 5.0;  // box gap enforced between unrelated objects
  int max_scene_attempts = 150;
  int max_place_attempts = 120;
  std::uint64_t seed = 1;

  VerbVocabulary vocabulary = default_vocabulary();

  void validate() const;
};

enum class Locomotion { kStand, kWalk, kSit };

/// Generator-side state per human; enough to re-evaluate every predicate.
struct HumanState {
  int box_index = -1;
  double orient_radians = 0.0;          // look direction
  Locomotion locomotion = Locomotion::kStand;
  std::optional<double> throw_radians;  // direction of the drawn throw mark
};

struct GenerationTrace {
  std::vector<HumanState> humans;
  GeometryRules rules;
};

/// Predicates over placed geometry (targets are non-human boxes).
bool holds(const Box& human, const Box& target, const GeometryRules& rules);
bool sits_on(const Box& human, const Box& target, const GeometryRules& rules);
bool looks_at(const Box& human, double orient_radians, const Box& target,
              const GeometryRules& rules);
bool throws_to(const Box& human, std::optional<double> throw_radians, const Box& target,
               const GeometryRules& rules);

struct GeneratedScene {
  Scene scene;
  GenerationTrace trace;
};

/// Lays out humans, targets and distractors, renders the raster, and emits
/// exactly the triplets whose predicates hold. Throws after bounded retries
/// when the configuration cannot be placed.
GeneratedScene generate_scene_with_trace(const SceneGenConfig& config, std::mt19937_64& rng);
Scene generate_scene(const SceneGenConfig& config, std::mt19937_64& rng);

/// Deterministic dataset: scene i uses an rng stream derived from
/// (config.seed, i), so regeneration is byte-identical and order-independent.
std::vector<Scene> generate_dataset(const SceneGenConfig& config, int count);

}  // namespace calipso::synth
