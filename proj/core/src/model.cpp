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

#include "calipso/net/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace calipso::net {

namespace {

float stable_sigmoid(float z) {
  if (z >= 0) return 1.0f / (1.0f + std::exp(-z));
  const float e = std::exp(z);
  return e / (1.0f + e);
}

// Feature width of the encoder stage producing level l: thinner below the
// first tapped level, full width from there on.
int stage_channels(const NetworkConfig& cfg, int level) {
  if (level >= cfg.level_min) return cfg.channels;
  return std::max(8, cfg.channels >> (cfg.level_min - level));
}

}  // namespace

void NetworkConfig::validate() const {
  if (blocks < 1) throw std::invalid_argument("network: blocks must be >= 1");
  if (embedding_dim < 1) throw std::invalid_argument("network: embedding_dim must be >= 1");
  if (level_min < 1 || level_min > level_max)
    throw std::invalid_argument("network: bad pyramid range");
  if (verbs < 1) throw std::invalid_argument("network: verbs must be >= 1");
  if (channels < 8) throw std::invalid_argument("network: channels must be >= 8");
}

InteractionModel::InteractionModel(const NetworkConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);

  int in_c = config_.image_channels;
  for (int l = 1; l <= config_.level_max; ++l) {
    Block b;
    const int out_c = stage_channels(config_, l);
    b.conv.init(in_c, out_c, 3, 2, 1, "encoder." + std::to_string(l), rng);
    b.bn.init(out_c, "encoder." + std::to_string(l));
    encoder_.push_back(std::move(b));
    in_c = out_c;
  }

  for (int l = config_.level_min; l <= config_.level_max; ++l) {
    Conv2d lat, sm;
    lat.init(stage_channels(config_, l), config_.channels, 1, 1, 0,
             "lateral." + std::to_string(l), rng);
    sm.init(config_.channels, config_.channels, 3, 1, 1, "smooth." + std::to_string(l), rng);
    laterals_.push_back(std::move(lat));
    smooth_.push_back(std::move(sm));
  }

  for (int copy = 0; copy < subnet_copies(); ++copy) {
    const std::string suffix = config_.share_weights_across_levels
                                   ? std::string("")
                                   : "." + std::to_string(copy);
    std::vector<Block> blocks;
    for (int b = 0; b < config_.blocks; ++b) {
      Block blk;
      blk.conv.init(config_.channels, config_.channels, 3, 1, 1,
                    "subnet" + suffix + ".block" + std::to_string(b), rng);
      blk.bn.init(config_.channels, "subnet" + suffix + ".block" + std::to_string(b));
      blocks.push_back(std::move(blk));
    }
    subnet_.push_back(std::move(blocks));

    HeadSet heads;
    heads.verb.init(config_.channels, config_.verb_head_channels(), 1, 1, 0,
                    "head" + suffix + ".verb", rng);
    if (config_.target_head_enabled)
      heads.target.init(config_.channels, config_.target_head_channels(), 1, 1, 0,
                        "head" + suffix + ".target", rng);
    heads.embedding.init(config_.channels, config_.embedding_head_channels(), 1, 1, 0,
                         "head" + suffix + ".embedding", rng);
    // Start classification heads at a low-score prior so the dense negatives
    // do not dominate the first steps.
    std::fill(heads.verb.bias.w.begin(), heads.verb.bias.w.end(), -2.0f);
    if (config_.target_head_enabled)
      std::fill(heads.target.bias.w.begin(), heads.target.bias.w.end(), -2.0f);
    heads_.push_back(std::move(heads));
  }
}

VarPtr InteractionModel::run_block(Block& b, Tape& tape, const VarPtr& x, OpCounter* ops) {
  return relu(tape, b.bn.forward(tape, b.conv.forward(tape, x, ops), ops));
}

ForwardPass InteractionModel::run(const Tensor& image, OpCounter* ops, bool training) {
  if (image.c != config_.image_channels)
    throw std::invalid_argument("forward: image channel count does not match configuration");
  if ((image.w >> config_.level_max) <= 0 || (image.h >> config_.level_max) <= 0)
    throw std::invalid_argument("forward: image too small for pyramid level " +
                                std::to_string(config_.level_max));

  ForwardPass pass;
  pass.tape.recording = training;
  pass.input = make_var(image);

  // Bottom-up encoder; keep the tapped stages.
  std::vector<VarPtr> taps(config_.pyramid_levels());
  VarPtr x = pass.input;
  for (int l = 1; l <= config_.level_max; ++l) {
    x = run_block(encoder_[l - 1], pass.tape, x, ops);
    if (l >= config_.level_min) taps[l - config_.level_min] = x;
  }

  // Top-down merge.
  const int n_levels = config_.pyramid_levels();
  std::vector<VarPtr> merged(n_levels);
  for (int i = n_levels - 1; i >= 0; --i) {
    VarPtr lat = laterals_[i].forward(pass.tape, taps[i], ops);
    if (i == n_levels - 1) {
      merged[i] = lat;
    } else {
      VarPtr up = upsample2x_to(pass.tape, merged[i + 1], lat->value.h, lat->value.w);
      merged[i] = add(pass.tape, lat, up);
    }
    merged[i] = smooth_[i].forward(pass.tape, merged[i], ops);
  }

  pass.verb_logits.resize(n_levels);
  pass.target_logits.resize(n_levels);
  pass.embeddings.resize(n_levels);
  pass.dense.levels.resize(n_levels);

  for (int i = 0; i < n_levels; ++i) {
    const int copy = config_.share_weights_across_levels ? 0 : i;
    VarPtr h = merged[i];
    for (auto& blk : subnet_[copy]) h = run_block(blk, pass.tape, h, ops);

    pass.verb_logits[i] = heads_[copy].verb.forward(pass.tape, h, ops);
    if (config_.target_head_enabled)
      pass.target_logits[i] = heads_[copy].target.forward(pass.tape, h, ops);
    pass.embeddings[i] = heads_[copy].embedding.forward(pass.tape, h, ops);

    DenseLevel& lev = pass.dense.levels[i];
    lev.level = config_.level_min + i;
    lev.width = pass.verb_logits[i]->value.w;
    lev.height = pass.verb_logits[i]->value.h;
    lev.anchors = config_.anchors_per_cell;
    lev.verbs = config_.verbs;
    lev.embedding_dim = config_.embedding_dim;
    lev.passive_enabled = config_.passive_head_enabled;
    lev.target_enabled = config_.target_head_enabled;

    const auto& vz = pass.verb_logits[i]->value.v;
    lev.verb_scores.resize(vz.size());
    for (std::size_t k = 0; k < vz.size(); ++k) lev.verb_scores[k] = stable_sigmoid(vz[k]);
    if (config_.target_head_enabled) {
      const auto& tz = pass.target_logits[i]->value.v;
      lev.target_scores.resize(tz.size());
      for (std::size_t k = 0; k < tz.size(); ++k) lev.target_scores[k] = stable_sigmoid(tz[k]);
    }
    lev.embeddings = pass.embeddings[i]->value.v;
  }
  if (ops) pass.dense.forward_ops = ops->macs;
  return pass;
}

DenseOutputs InteractionModel::forward(const Tensor& image, OpCounter* ops) {
  return run(image, ops, false).dense;
}

ForwardPass InteractionModel::forward_train(const Tensor& image, OpCounter* ops) {
  return run(image, ops, true);
}

void InteractionModel::backward(ForwardPass& pass, const DenseGrads& grads) {
  for (std::size_t i = 0; i < pass.dense.levels.size(); ++i) {
    pass.verb_logits[i]->ensure_grad();
    std::copy(grads.levels[i].verb.begin(), grads.levels[i].verb.end(),
              pass.verb_logits[i]->grad.v.begin());
    if (pass.target_logits[i]) {
      pass.target_logits[i]->ensure_grad();
      std::copy(grads.levels[i].target.begin(), grads.levels[i].target.end(),
                pass.target_logits[i]->grad.v.begin());
    }
    pass.embeddings[i]->ensure_grad();
    std::copy(grads.levels[i].embeddings.begin(), grads.levels[i].embeddings.end(),
              pass.embeddings[i]->grad.v.begin());
  }
  pass.tape.backward();
}

std::vector<ParamBlock*> InteractionModel::params() {
  std::vector<ParamBlock*> out;
  auto push_conv = [&out](Conv2d& c) {
    out.push_back(&c.weight);
    out.push_back(&c.bias);
  };
  auto push_bn = [&out](BatchNorm& b) {
    out.push_back(&b.gamma);
    out.push_back(&b.beta);
  };
  for (auto& blk : encoder_) {
    push_conv(blk.conv);
    push_bn(blk.bn);
  }
  for (auto& c : laterals_) push_conv(c);
  for (auto& c : smooth_) push_conv(c);
  for (auto& copy : subnet_)
    for (auto& blk : copy) {
      push_conv(blk.conv);
      push_bn(blk.bn);
    }
  for (auto& h : heads_) {
    push_conv(h.verb);
    if (config_.target_head_enabled) push_conv(h.target);
    push_conv(h.embedding);
  }
  return out;
}

std::size_t InteractionModel::parameter_count() {
  std::size_t n = 0;
  for (auto* p : params()) n += p->w.size();
  return n;
}

std::size_t InteractionModel::subnet_parameter_count() {
  std::size_t n = 0;
  for (auto& copy : subnet_)
    for (auto& blk : copy)
      n += blk.conv.weight.w.size() + blk.conv.bias.w.size() + blk.bn.gamma.w.size() +
           blk.bn.beta.w.size();
  return n;
}

void InteractionModel::zero_grads() {
  for (auto* p : params()) std::fill(p->g.begin(), p->g.end(), 0.0f);
}

Tensor image_to_tensor(const Image& image, bool horizontal_flip) {
  Tensor t(image.channels, image.height, image.width);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      const int sx = horizontal_flip ? image.width - 1 - x : x;
      for (int c = 0; c < image.channels; ++c)
        t.at(c, y, x) = image.at(sx, y, c) / 255.0f;
    }
  return t;
}

}  // namespace calipso::net
