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

#include "calipso/net/train.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "calipso/net/targets.hpp"

namespace calipso::net {

namespace {

// Per-scene precomputation, one slot per flip variant.
struct CachedScene {
  Tensor image;
  AnchorAssignment assignment;
  TrainingTargets targets;
  std::vector<Box> boxes;
};

Scene flipped_scene(const Scene& scene) {
  Scene out = scene;  // image copied but unused; boxes and triplets matter
  const double w = scene.image.width;
  for (auto& b : out.boxes) {
    const double x0 = b.x_min, x1 = b.x_max;
    b.x_min = w - x1;
    b.x_max = w - x0;
  }
  return out;
}

void sgd_step(std::vector<ParamBlock*>& params, const OptimizerConfig& opt, double lr,
              double inv_batch) {
  for (auto* p : params) {
    const float wd = p->weight_decay ? static_cast<float>(opt.weight_decay) : 0.0f;
    for (std::size_t i = 0; i < p->w.size(); ++i) {
      const float g = static_cast<float>(p->g[i] * inv_batch) + wd * p->w[i];
      p->m[i] = static_cast<float>(opt.momentum) * p->m[i] + g;
      p->w[i] -= static_cast<float>(lr) * p->m[i];
    }
  }
}

}  // namespace

LossReport evaluate_scene_losses(const DenseOutputs& dense, const AnchorGrid& grid,
                                 const AnchorAssignment& assignment,
                                 const std::vector<Box>& boxes, const TrainingTargets& targets,
                                 const LossConfig& loss_config, DenseGrads* grads) {
  const int V = static_cast<int>(targets.classes.per_verb.size());
  LossReport report;
  report.pull_per_verb.assign(V, 0.0);
  report.push_per_verb.assign(V, 0.0);

  report.verb_loss = verb_loss(dense, targets.verb_labels, loss_config, grads);
  const bool target_head = !dense.levels.empty() && dense.levels.front().target_enabled;
  if (target_head)
    report.target_loss = target_presence_loss(dense, targets.target_labels, loss_config, grads);

  std::vector<double> per_verb(V, 0.0);
  for (int v = 0; v < V; ++v) {
    const auto& classes = targets.classes.per_verb[v];
    if (classes.empty()) continue;  // no assigned anchors: contributes 0, still divided by V
    auto gather = gather_verb_embeddings(dense, grid, assignment, boxes, classes, v);
    if (grads) {
      std::vector<double> row_grads(gather.batch.rows.size(), 0.0);
      report.pull_per_verb[v] = pull_loss_grad(gather.batch, loss_config, row_grads);
      report.push_per_verb[v] = push_loss_grad(gather.batch, v, loss_config, row_grads);
      scatter_embedding_grads(gather, row_grads, v, 1.0 / V, dense, *grads);
    } else {
      report.pull_per_verb[v] = pull_loss(gather.batch, loss_config);
      report.push_per_verb[v] = push_loss(gather.batch, v, loss_config);
    }
    per_verb[v] = report.pull_per_verb[v] + report.push_per_verb[v];
  }

  double emb_sum = 0;
  for (double e : per_verb) emb_sum += e;
  report.embedding_loss = V > 0 ? emb_sum / V : 0.0;
  report.total = total_loss(report.verb_loss, report.target_loss, per_verb, V);
  return report;
}

TrainResult train_model(InteractionModel& model, const std::vector<Scene>& scenes,
                        const VerbVocabulary& vocabulary, const AnchorGridConfig& grid_config,
                        const TrainConfig& config,
                        const std::function<void(int, const LossReport&)>& on_step) {
  if (scenes.empty()) throw std::invalid_argument("train: dataset is empty");

  LossConfig loss_config = config.loss;
  if (loss_config.usual_targets.empty())
    loss_config.usual_targets = usual_targets_from_scenes(scenes);

  // One grid per distinct image size; scenes typically share one.
  const AnchorGrid grid(scenes.front().image.width, scenes.front().image.height, grid_config);
  for (const auto& s : scenes)
    if (s.image.width != scenes.front().image.width ||
        s.image.height != scenes.front().image.height)
      throw std::invalid_argument("train: scenes must share one image size");

  std::vector<std::array<std::unique_ptr<CachedScene>, 2>> cache(scenes.size());
  auto cached = [&](int index, bool flip) -> CachedScene& {
    auto& slot = cache[index][flip ? 1 : 0];
    if (!slot) {
      slot = std::make_unique<CachedScene>();
      const Scene geo = flip ? flipped_scene(scenes[index]) : scenes[index];
      slot->image = image_to_tensor(scenes[index].image, flip);
      slot->assignment = assign_anchors(grid, geo.boxes);
      slot->targets =
          build_training_targets(geo, grid, slot->assignment, vocabulary, config.equivalence);
      slot->boxes = geo.boxes;
    }
    return *slot;
  };

  std::mt19937_64 rng(config.seed);
  std::vector<int> order(scenes.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();  // triggers reshuffle on first use

  auto params = model.params();
  TrainResult result;
  result.curve.reserve(config.steps);

  const int drop_step = static_cast<int>(config.optimizer.drop_at_fraction * config.steps);
  for (int step = 0; step < config.steps; ++step) {
    model.zero_grads();
    LossReport mean;
    mean.pull_per_verb.assign(vocabulary.size(), 0.0);
    mean.push_per_verb.assign(vocabulary.size(), 0.0);

    for (int b = 0; b < config.batch_size; ++b) {
      if (cursor >= order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const int index = order[cursor++];
      const bool flip = config.horizontal_flip && (rng() & 1u);
      CachedScene& cs = cached(index, flip);

      ForwardPass pass = model.forward_train(cs.image);
      DenseGrads grads = DenseGrads::zeros_like(pass.dense);
      LossReport report;
      try {
        report = evaluate_scene_losses(pass.dense, grid, cs.assignment, cs.boxes, cs.targets,
                                       loss_config, &grads);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("training diverged at step " + std::to_string(step) + ": " +
                                 e.what());
      }
      model.backward(pass, grads);

      mean.verb_loss += report.verb_loss;
      mean.target_loss += report.target_loss;
      mean.embedding_loss += report.embedding_loss;
      mean.total += report.total;
      for (int v = 0; v < vocabulary.size(); ++v) {
        mean.pull_per_verb[v] += report.pull_per_verb[v];
        mean.push_per_verb[v] += report.push_per_verb[v];
      }
    }

    const double inv_batch = 1.0 / config.batch_size;
    mean.verb_loss *= inv_batch;
    mean.target_loss *= inv_batch;
    mean.embedding_loss *= inv_batch;
    mean.total *= inv_batch;
    for (auto& x : mean.pull_per_verb) x *= inv_batch;
    for (auto& x : mean.push_per_verb) x *= inv_batch;

    const double lr = step >= drop_step
                          ? config.optimizer.learning_rate * config.optimizer.drop_factor
                          : config.optimizer.learning_rate;
    sgd_step(params, config.optimizer, lr, inv_batch);

    if (on_step) on_step(step, mean);
    result.curve.push_back(std::move(mean));
  }
  return result;
}

}  // namespace calipso::net
