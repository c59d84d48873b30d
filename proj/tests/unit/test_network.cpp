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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"

#include "calipso/net/checkpoint.hpp"
#include "calipso/net/model.hpp"
#include "calipso/net/targets.hpp"
#include "calipso/net/train.hpp"
#include "calipso/synth.hpp"

using namespace calipso;
using net::InteractionModel;
using net::NetworkConfig;
using net::Tensor;

namespace {

Tensor random_image(int channels, int size, std::uint64_t seed) {
  Tensor t(channels, size, size);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  for (auto& v : t.v) v = dist(rng);
  return t;
}

NetworkConfig tiny_config() {
  NetworkConfig cfg;
  cfg.level_min = 3;
  cfg.level_max = 4;
  cfg.channels = 8;
  cfg.blocks = 1;
  cfg.verbs = 2;
  cfg.embedding_dim = 2;
  return cfg;
}

// Single-level dense maps with constant scores, for direct BCE checks.
DenseOutputs constant_dense(int w, int h, int anchors, int verbs, float score) {
  DenseOutputs dense;
  DenseLevel lev;
  lev.level = 3;
  lev.width = w;
  lev.height = h;
  lev.anchors = anchors;
  lev.verbs = verbs;
  lev.embedding_dim = 2;
  lev.verb_scores.assign(static_cast<std::size_t>(anchors) * 2 * verbs * w * h, score);
  lev.target_scores.assign(static_cast<std::size_t>(anchors) * 2 * verbs * w * h, score);
  lev.embeddings.assign(static_cast<std::size_t>(anchors) * verbs * 2 * w * h, 0.0f);
  dense.levels.push_back(std::move(lev));
  return dense;
}

}  // namespace

TEST_CASE("forward shapes follow the channel formulas") {
  NetworkConfig cfg;  // defaults: levels [3,5], V=6, T=8, A=9, 64 channels
  InteractionModel model(cfg, 1);
  const DenseOutputs dense = model.forward(random_image(3, 128, 1));

  REQUIRE(dense.levels.size() == 3);
  const DenseLevel& l3 = dense.levels[0];
  CHECK(l3.width == 16);
  CHECK(l3.height == 16);
  CHECK(l3.verb_scores.size() == std::size_t(9 * 12) * 16 * 16);
  CHECK(l3.target_scores.size() == std::size_t(9 * 12) * 16 * 16);
  CHECK(l3.embeddings.size() == std::size_t(9 * 6 * 8) * 16 * 16);
  CHECK(dense.levels[1].width == 8);
  CHECK(dense.levels[2].width == 4);

  for (float s : l3.verb_scores) {
    CHECK(s >= 0.0f);
    CHECK(s <= 1.0f);
  }
}

TEST_CASE("odd image sizes floor at every level") {
  NetworkConfig cfg = tiny_config();
  InteractionModel model(cfg, 1);
  const DenseOutputs dense = model.forward(random_image(3, 100, 2));
  CHECK(dense.levels[0].width == 100 / 8);
  CHECK(dense.levels[1].width == 100 / 16);
}

TEST_CASE("output shapes depend only on size and config") {
  InteractionModel model(tiny_config(), 3);
  const auto a = model.forward(random_image(3, 64, 10));
  const auto b = model.forward(random_image(3, 64, 11));
  REQUIRE(a.levels.size() == b.levels.size());
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    CHECK(a.levels[l].verb_scores.size() == b.levels[l].verb_scores.size());
    CHECK(a.levels[l].embeddings.size() == b.levels[l].embeddings.size());
  }
}

TEST_CASE("forward is deterministic") {
  InteractionModel model(tiny_config(), 3);
  const auto a = model.forward(random_image(3, 64, 10));
  const auto b = model.forward(random_image(3, 64, 10));
  CHECK(a.levels[0].verb_scores == b.levels[0].verb_scores);
  CHECK(a.levels[0].embeddings == b.levels[0].embeddings);
}

TEST_CASE("forward cost is identical across scene content") {
  InteractionModel model(tiny_config(), 3);
  net::OpCounter ops_a, ops_b;
  model.forward(random_image(3, 64, 10), &ops_a);
  model.forward(random_image(3, 64, 99), &ops_b);
  CHECK(ops_a.macs == ops_b.macs);
  CHECK(ops_a.macs > 0);
}

TEST_CASE("too-small images are rejected with a configuration error") {
  NetworkConfig cfg = tiny_config();
  cfg.level_max = 5;
  InteractionModel model(cfg, 1);
  CHECK_THROWS_AS(model.forward(random_image(3, 16, 1)), std::invalid_argument);
}

TEST_CASE("shared subnet weights are independent of the level count") {
  NetworkConfig narrow = tiny_config();
  narrow.level_max = 3;
  NetworkConfig wide = tiny_config();
  wide.level_max = 5;

  InteractionModel a(narrow, 1), b(wide, 1);
  CHECK(a.subnet_parameter_count() == b.subnet_parameter_count());

  NetworkConfig unshared = wide;
  unshared.share_weights_across_levels = false;
  InteractionModel c(unshared, 1);
  CHECK(c.subnet_parameter_count() == 3 * b.subnet_parameter_count());
}

TEST_CASE("disabling heads removes exactly their channels") {
  NetworkConfig cfg = tiny_config();
  cfg.passive_head_enabled = false;
  InteractionModel no_passive(cfg, 1);
  const auto dense = no_passive.forward(random_image(3, 64, 4));
  CHECK(dense.levels[0].verb_scores.size() ==
        std::size_t(9 * cfg.verbs) * dense.levels[0].width * dense.levels[0].height);
  CHECK_FALSE(dense.levels[0].target_scores.empty());

  NetworkConfig cfg2 = tiny_config();
  cfg2.target_head_enabled = false;
  InteractionModel no_target(cfg2, 1);
  const auto dense2 = no_target.forward(random_image(3, 64, 4));
  CHECK(dense2.levels[0].target_scores.empty());
  CHECK(dense2.levels[0].verb_scores.size() ==
        std::size_t(9 * 2 * cfg2.verbs) * dense2.levels[0].width * dense2.levels[0].height);
}

TEST_CASE("training target construction from a hold triplet") {
  const auto vocab = synth::default_vocabulary();
  Scene scene;
  scene.human_class_id = 0;
  scene.image.width = scene.image.height = 64;
  scene.image.channels = 3;
  scene.image.data.assign(64 * 64 * 3, 0);
  scene.boxes.push_back({8, 8, 48, 48, 0});    // human
  scene.boxes.push_back({40, 20, 62, 42, 1});  // cup
  scene.triplets.push_back({0, synth::kHold, 1});
  scene.triplets.push_back({0, synth::kStand, std::nullopt});

  AnchorGridConfig gcfg;
  gcfg.level_min = 3;
  gcfg.level_max = 4;
  const AnchorGrid grid(64, 64, gcfg);
  const auto assignment = assign_anchors(grid, scene.boxes);
  REQUIRE_FALSE(assignment.anchors_of_box[0].empty());
  REQUIRE_FALSE(assignment.anchors_of_box[1].empty());

  const auto targets = net::build_training_targets(scene, grid, assignment, vocab);

  int human_active_hold = 0, cup_passive_hold = 0, human_active_stand = 0;
  for (const auto& rec : targets.verb_labels) {
    const int box = assignment.box_of_anchor[rec.at.anchor];
    if (box == 0) {
      human_active_hold += rec.active[synth::kHold];
      human_active_stand += rec.active[synth::kStand];
      CHECK(rec.passive[synth::kHold] == 0);
    } else {
      cup_passive_hold += rec.passive[synth::kHold];
      CHECK(rec.active[synth::kHold] == 0);
    }
  }
  CHECK(human_active_hold == static_cast<int>(assignment.anchors_of_box[0].size()));
  CHECK(human_active_stand == static_cast<int>(assignment.anchors_of_box[0].size()));
  CHECK(cup_passive_hold == static_cast<int>(assignment.anchors_of_box[1].size()));

  // Target presence: role 0 of hold is on; stand (targetless) stays off.
  REQUIRE_FALSE(targets.target_labels.empty());
  for (const auto& rec : targets.target_labels) {
    CHECK(rec.presence[2 * synth::kHold + 0] == 1);
    CHECK(rec.presence[2 * synth::kHold + 1] == 0);
    CHECK(rec.presence[2 * synth::kStand + 0] == 0);
  }

  // A person with no triplets gets all-zero labels.
  Scene idle = scene;
  idle.triplets.clear();
  const auto idle_targets = net::build_training_targets(idle, grid, assignment, vocab);
  for (const auto& rec : idle_targets.verb_labels)
    for (int v = 0; v < vocab.size(); ++v) {
      CHECK(rec.active[v] == 0);
      CHECK(rec.passive[v] == 0);
    }
}

TEST_CASE("verb BCE: perfect predictions vanish, 0.5 gives ln 2") {
  const LossConfig config;
  DenseOutputs dense = constant_dense(4, 4, 1, 2, 0.5f);

  std::vector<VerbLabels> labels;
  VerbLabels rec;
  rec.at = {0, 0, 1, 1, 0};
  rec.active = {1, 0};
  rec.passive = {0, 0};
  labels.push_back(rec);

  CHECK(verb_loss(dense, labels, config) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Matching predictions: active channel 0 at 1, everything else 0.
  DenseLevel& lev = dense.levels[0];
  for (auto& s : lev.verb_scores) s = 0.0f;
  lev.verb_scores[lev.idx(0 * 4 + 0, 1, 1)] = 1.0f;
  CHECK(verb_loss(dense, labels, config) < 1e-5);
}

TEST_CASE("target presence BCE mirrors the verb loss") {
  const LossConfig config;
  DenseOutputs dense = constant_dense(4, 4, 1, 2, 0.5f);
  std::vector<TargetLabels> labels;
  TargetLabels rec;
  rec.at = {0, 0, 2, 2, 0};
  rec.presence = {1, 0, 0, 0};
  labels.push_back(rec);
  CHECK(target_presence_loss(dense, labels, config) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("layer backward passes agree with finite differences") {
  // End-to-end through conv + bn + relu + conv on a tiny input, in float:
  // loose tolerance, catches structural mistakes.
  std::mt19937_64 rng(9);
  net::Conv2d conv1, conv2;
  net::BatchNorm bn;
  conv1.init(2, 4, 3, 1, 1, "t.conv1", rng);
  bn.init(4, "t.bn");
  conv2.init(4, 3, 1, 1, 0, "t.conv2", rng);

  Tensor x(2, 5, 5);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  for (auto& v : x.v) v = dist(rng);

  auto loss_of = [&]() {
    net::Tape tape;
    auto out = conv2.forward(tape, net::relu(tape, bn.forward(tape, conv1.forward(
                                       tape, net::make_var(x), nullptr), nullptr)),
                             nullptr);
    double s = 0;
    for (std::size_t i = 0; i < out->value.size(); ++i) {
      const double z = out->value.v[i];
      s += z * z;
    }
    return 0.5 * s;
  };

  // Analytic gradient of 0.5*sum(z^2) w.r.t. parameters.
  net::Tape tape;
  tape.recording = true;
  auto in = net::make_var(x);
  auto out = conv2.forward(tape, net::relu(tape, bn.forward(tape, conv1.forward(tape, in, nullptr), nullptr)), nullptr);
  out->ensure_grad();
  for (std::size_t i = 0; i < out->value.size(); ++i) out->grad.v[i] = out->value.v[i];
  tape.backward();

  auto check_block = [&](net::ParamBlock& p, int samples) {
    std::uniform_int_distribution<std::size_t> pick(0, p.w.size() - 1);
    for (int s = 0; s < samples; ++s) {
      const std::size_t i = pick(rng);
      const float saved = p.w[i];
      const float h = 1e-2f;
      p.w[i] = saved + h;
      const double up = loss_of();
      p.w[i] = saved - h;
      const double down = loss_of();
      p.w[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      CHECK(std::abs(fd - p.g[i]) < 5e-2 * std::max({1.0, std::abs(fd), std::abs((double)p.g[i])}));
    }
  };
  check_block(conv1.weight, 6);
  check_block(conv1.bias, 2);
  check_block(bn.gamma, 2);
  check_block(bn.beta, 2);
  check_block(conv2.weight, 6);
}

TEST_CASE("checkpoint round-trip preserves the forward pass") {
  const auto vocab = synth::default_vocabulary();
  NetworkConfig cfg = tiny_config();
  cfg.verbs = vocab.size();
  InteractionModel model(cfg, 12);
  AnchorGridConfig gcfg;
  gcfg.level_min = cfg.level_min;
  gcfg.level_max = cfg.level_max;

  const std::string path = "test_checkpoint.json";
  net::save_checkpoint(path, model, gcfg, vocab);
  auto loaded = net::load_checkpoint(path);

  const Tensor img = random_image(3, 64, 5);
  const auto a = model.forward(img);
  const auto b = loaded.model->forward(img);
  CHECK(a.levels[0].verb_scores == b.levels[0].verb_scores);
  CHECK(a.levels[0].embeddings == b.levels[0].embeddings);

  // Tampering with the stored config must be refused.
  {
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto at = text.find("\"blocks\":1");
    REQUIRE(at != std::string::npos);
    text.replace(at, 10, "\"blocks\":2");
    std::ofstream out(path);
    out << text;
  }
  CHECK_THROWS_WITH_AS(net::load_checkpoint(path), doctest::Contains("hash"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("a short training run descends and is seed-deterministic") {
  synth::SceneGenConfig gen;
  gen.image_width = gen.image_height = 64;
  gen.humans_max = 1;
  gen.p_look = 0;
  gen.p_throw = 0;
  gen.p_sit = 0;
  gen.p_walk = 0.5;
  gen.max_distractors = 1;
  gen.rules.look_max_dist = 40;
  gen.rules.throw_min_dist = 44;
  gen.rules.throw_max_dist = 60;
  gen.seed = 5;
  const auto scenes = synth::generate_dataset(gen, 6);

  NetworkConfig cfg = tiny_config();
  cfg.verbs = gen.vocabulary.size();
  AnchorGridConfig gcfg;
  gcfg.level_min = cfg.level_min;
  gcfg.level_max = cfg.level_max;

  net::TrainConfig tc;
  tc.steps = 60;
  tc.batch_size = 1;
  tc.seed = 3;

  InteractionModel model_a(cfg, tc.seed);
  const auto run_a = net::train_model(model_a, scenes, gen.vocabulary, gcfg, tc);
  InteractionModel model_b(cfg, tc.seed);
  const auto run_b = net::train_model(model_b, scenes, gen.vocabulary, gcfg, tc);

  REQUIRE(run_a.curve.size() == 60);
  // Determinism: identical loss curves for a fixed seed.
  for (std::size_t i = 0; i < run_a.curve.size(); ++i)
    CHECK(run_a.curve[i].total == run_b.curve[i].total);

  // Sanity descent: the tail improves on the head.
  double head = 0, tail = 0;
  for (int i = 0; i < 10; ++i) head += run_a.curve[i].total;
  for (int i = 0; i < 10; ++i) tail += run_a.curve[run_a.curve.size() - 1 - i].total;
  CHECK(tail < head);
}
