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

#include <algorithm>
#include <random>

#include "doctest.h"

#include "calipso/eval.hpp"
#include "calipso/pairwise.hpp"
#include "calipso/synth.hpp"
#include "../support/oracles.hpp"

using namespace calipso;

namespace {

Scene gt_scene(std::vector<Box> boxes, std::vector<InteractionTriplet> triplets) {
  Scene scene;
  scene.human_class_id = 0;
  scene.image.width = scene.image.height = 64;
  scene.image.channels = 3;
  scene.image.data.assign(64 * 64 * 3, 0);
  scene.boxes = std::move(boxes);
  scene.triplets = std::move(triplets);
  return scene;
}

ScoredTriplet prediction(const Box& subject, int verb, std::optional<Box> target, double score) {
  ScoredTriplet p;
  p.subject = subject;
  p.verb_id = verb;
  p.target = target;
  p.score = score;
  p.kind = target ? PredictionKind::kTriplet : PredictionKind::kPair;
  return p;
}

// Random tiny instance for the oracle-equivalence property.
struct TinyInstance {
  std::vector<Scene> scenes;
  std::vector<ScenePredictions> predictions;
};

TinyInstance random_instance(std::mt19937_64& rng, int verbs) {
  std::uniform_int_distribution<int> n_gt_dist(1, 3), n_pred_dist(0, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0), coord(0, 40), side(8, 20);
  TinyInstance inst;

  const Box human{2, 2, 22, 22, 0};
  std::vector<Box> boxes = {human};
  std::vector<InteractionTriplet> triplets;
  const int n_gt = n_gt_dist(rng);
  for (int g = 0; g < n_gt; ++g) {
    const double x = coord(rng), y = coord(rng), w = side(rng);
    boxes.push_back({x, y, x + w, y + w, 1});
    const int verb = static_cast<int>(unit(rng) * verbs);
    if (unit(rng) < 0.25)
      triplets.push_back({0, verb, std::nullopt});
    else
      triplets.push_back({0, verb, static_cast<int>(boxes.size()) - 1});
  }
  inst.scenes.push_back(gt_scene(boxes, triplets));

  ScenePredictions sp;
  sp.scene_index = 0;
  const int n_pred = n_pred_dist(rng);
  for (int p = 0; p < n_pred; ++p) {
    const Scene& scene = inst.scenes[0];
    if (unit(rng) < 0.6 && !scene.triplets.empty()) {
      // A near-copy of some ground-truth triplet, possibly perturbed.
      const auto& gt = scene.triplets[static_cast<int>(unit(rng) * scene.triplets.size())];
      Box subj = scene.boxes[gt.subject_index];
      std::optional<Box> target;
      if (gt.target_index) {
        target = scene.boxes[*gt.target_index];
        if (unit(rng) < 0.3) {  // spoil the target box
          target->x_min += 30;
          target->x_max += 30;
        }
      }
      sp.predictions.push_back(prediction(subj, gt.verb_id, target, unit(rng)));
    } else {
      const double x = coord(rng), y = coord(rng);
      sp.predictions.push_back(prediction(
          Box{x, y, x + 15, y + 15, 0}, static_cast<int>(unit(rng) * verbs),
          unit(rng) < 0.5 ? std::optional<Box>(Box{x + 20, y, x + 30, y + 10, 1}) : std::nullopt,
          unit(rng)));
    }
  }
  inst.predictions.push_back(std::move(sp));
  return inst;
}

}  // namespace

TEST_CASE("perfect predictions give mean AP 1") {
  const auto vocab = synth::default_vocabulary();
  const Box human{2, 2, 22, 22, 0};
  const Box cup{30, 2, 45, 17, 1};
  const auto scene =
      gt_scene({human, cup}, {{0, synth::kHold, 1}, {0, synth::kStand, std::nullopt}});

  ScenePredictions sp;
  sp.scene_index = 0;
  sp.predictions.push_back(prediction(human, synth::kHold, cup, 1.0));
  sp.predictions.push_back(prediction(human, synth::kStand, std::nullopt, 1.0));

  const auto result = ap_role({sp}, {scene}, vocab);
  CHECK(result.mean == doctest::Approx(1.0));
  CHECK(result.per_verb.size() == 2);  // only verbs with ground truth count
}

TEST_CASE("no predictions give AP 0") {
  const auto vocab = synth::default_vocabulary();
  const Box human{2, 2, 22, 22, 0};
  const auto scene = gt_scene({human}, {{0, synth::kStand, std::nullopt}});
  const auto result = ap_role({}, {scene}, vocab);
  CHECK(result.mean == 0.0);
}

TEST_CASE("hand PR curve: wrong at 0.95 over correct at 0.9 gives AP 0.5") {
  const auto vocab = synth::default_vocabulary();
  const Box human{2, 2, 22, 22, 0};
  const Box cup{30, 2, 45, 17, 1};
  const auto scene = gt_scene({human, cup}, {{0, synth::kHold, 1}});

  ScenePredictions sp;
  sp.scene_index = 0;
  Box wrong = cup;
  wrong.x_min += 30;
  wrong.x_max += 30;
  sp.predictions.push_back(prediction(human, synth::kHold, wrong, 0.95));
  sp.predictions.push_back(prediction(human, synth::kHold, cup, 0.9));

  const auto result = ap_role({sp}, {scene}, vocab);
  CHECK(result.per_verb.at(synth::kHold) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("prediction input order does not change AP") {
  const auto vocab = synth::default_vocabulary();
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng, vocab.size());
    // Distinct scores so that ordering is fully determined.
    double s = 0.9;
    for (auto& p : inst.predictions[0].predictions) {
      p.score = s;
      s -= 0.07;
    }
    const auto base = ap_role(inst.predictions, inst.scenes, vocab);
    auto shuffled = inst.predictions;
    std::shuffle(shuffled[0].predictions.begin(), shuffled[0].predictions.end(), rng);
    const auto perm = ap_role(shuffled, inst.scenes, vocab);
    CHECK(base.mean == doctest::Approx(perm.mean).epsilon(1e-12));
  }
}

TEST_CASE("each ground-truth triplet is credited at most once") {
  const auto vocab = synth::default_vocabulary();
  const Box human{2, 2, 22, 22, 0};
  const Box cup{30, 2, 45, 17, 1};
  const auto scene = gt_scene({human, cup}, {{0, synth::kHold, 1}});

  ScenePredictions sp;
  sp.scene_index = 0;
  sp.predictions.push_back(prediction(human, synth::kHold, cup, 0.9));
  sp.predictions.push_back(prediction(human, synth::kHold, cup, 0.8));  // duplicate

  const auto result = ap_role({sp}, {scene}, vocab);
  // TP at rank 1, FP at rank 2: AP is exactly 1.0 (recall saturates first).
  CHECK(result.per_verb.at(synth::kHold) == doctest::Approx(1.0));
}

TEST_CASE("ap matches the exhaustive oracle on random tiny instances") {
  const auto vocab = synth::default_vocabulary();
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(rng, vocab.size());
    const auto result = ap_role(inst.predictions, inst.scenes, vocab);
    for (int v = 0; v < vocab.size(); ++v) {
      const double oracle = testing::ap_oracle_for_verb(inst.predictions, inst.scenes, v);
      if (oracle < 0) {
        CHECK(result.per_verb.find(v) == result.per_verb.end());
      } else {
        REQUIRE(result.per_verb.count(v) == 1);
        CHECK(result.per_verb.at(v) == doctest::Approx(oracle).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("pairwise baseline runs one subnet evaluation per pair") {
  const auto vocab = synth::default_vocabulary();
  PairwiseBaseline baseline(PairwiseBaseline::Config{}, vocab.size());

  synth::SceneGenConfig cfg;
  cfg.seed = 8;
  std::mt19937_64 rng(8);
  const Scene scene = synth::generate_scene(cfg, rng);

  auto detections_for = [&](int humans, int objects) {
    std::vector<Detection> out;
    int h = 0, o = 0;
    for (const auto& b : scene.boxes) {
      if (b.class_id == 0 && h < humans) {
        out.push_back({b, 0, 1.0});
        ++h;
      }
    }
    for (int k = 0; k < objects; ++k) {
      Box b{5.0 + 7 * k, 40.0, 20.0 + 7 * k, 55.0, 1};
      out.push_back({b, 1, 1.0});
      ++o;
    }
    return out;
  };

  int evals = 0;
  baseline.detect(scene.image, detections_for(1, 1), vocab, 0.05, nullptr, &evals);
  CHECK(evals == 1);

  net::OpCounter ops3, ops15;
  baseline.detect(scene.image, detections_for(1, 3), vocab, 0.05, &ops3, &evals);
  CHECK(evals == 3);
  baseline.detect(scene.image, detections_for(1, 15), vocab, 0.05, &ops15, &evals);
  CHECK(evals == 15);
  // Cost is exactly linear in the number of pairs.
  CHECK(ops15.macs == doctest::Approx(5.0 * ops3.macs).epsilon(1e-9));
  CHECK(ops3.macs == 3 * baseline.ops_per_pair());
}
