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

#include <functional>
#include <vector>

#include "calipso/anchors.hpp"
#include "calipso/losses.hpp"
#include "calipso/net/model.hpp"
#include "calipso/net/targets.hpp"
#include "calipso/types.hpp"

namespace calipso::net {

struct OptimizerConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  double drop_factor = 0.1;      // learning-rate decay multiplier
  double drop_at_fraction = 0.75;  // applied at this fraction of the step budget
};

struct TrainConfig {
  int steps = 1600;
  int batch_size = 2;
  std::uint64_t seed = 7;
  bool horizontal_flip = true;
  OptimizerConfig optimizer;
  LossConfig loss;  // usual_targets filled from the training scenes when empty
  EquivalenceOptions equivalence;
};

struct TrainResult {
  std::vector<LossReport> curve;  // one report per step (batch mean)
};

/// Runs every step of the same closed loop: sample scenes, forward, evaluate
/// the three task losses, backpropagate, SGD update. Deterministic for a
/// fixed seed. Throws when the total loss turns non-finite, naming the step.
TrainResult train_model(InteractionModel& model, const std::vector<Scene>& scenes,
                        const VerbVocabulary& vocabulary, const AnchorGridConfig& grid_config,
                        const TrainConfig& config,
                        const std::function<void(int, const LossReport&)>& on_step = {});

/// Loss evaluation for one scene against dense outputs; shared by the trainer
/// and by tests. When `grads` is given, fills d(loss)/d(logit|embedding).
LossReport evaluate_scene_losses(const DenseOutputs& dense, const AnchorGrid& grid,
                                 const AnchorAssignment& assignment,
                                 const std::vector<Box>& boxes, const TrainingTargets& targets,
                                 const LossConfig& loss_config, DenseGrads* grads = nullptr);

}  // namespace calipso::net
