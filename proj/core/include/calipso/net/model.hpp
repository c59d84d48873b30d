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
#include <memory>
#include <vector>

#include "calipso/losses.hpp"
#include "calipso/net/layers.hpp"
#include "calipso/net/tensor.hpp"
#include "calipso/types.hpp"

namespace calipso::net {

/// Architecture switches. The per-head flags exist for the ablation harness;
/// disabling a head removes exactly its channels and loss terms.
struct NetworkConfig {
  int level_min = 3;
  int level_max = 5;
  int channels = 64;  // feature width on pyramid levels
  int blocks = 8;     // interaction subnet depth
  int anchors_per_cell = 9;
  int verbs = 6;
  int embedding_dim = 8;
  int image_channels = 3;
  bool share_weights_across_levels = true;
  bool passive_head_enabled = true;
  bool target_head_enabled = true;

  void validate() const;
  int pyramid_levels() const { return level_max - level_min + 1; }
  int verb_head_channels() const {
    return anchors_per_cell * (passive_head_enabled ? 2 * verbs : verbs);
  }
  int target_head_channels() const { return anchors_per_cell * 2 * verbs; }
  int embedding_head_channels() const { return anchors_per_cell * verbs * embedding_dim; }
};

/// Retained state of one recorded forward pass; consumed by backward().
struct ForwardPass {
  Tape tape;
  VarPtr input;
  std::vector<VarPtr> verb_logits;    // per pyramid level
  std::vector<VarPtr> target_logits;  // empty slots when the head is disabled
  std::vector<VarPtr> embeddings;
  DenseOutputs dense;
};

/// Multi-level encoder + top-down feature merge + interaction subnet with
/// three dense heads. One forward pass reads the whole image once; the cost
/// depends only on image size and configuration, never on scene content.
class InteractionModel {
 public:
  InteractionModel(const NetworkConfig& config, std::uint64_t seed);

  const NetworkConfig& config() const { return config_; }

  /// Inference-only pass (no tape).
  DenseOutputs forward(const Tensor& image, OpCounter* ops = nullptr);

  /// Recorded pass for training.
  ForwardPass forward_train(const Tensor& image, OpCounter* ops = nullptr);

  /// Seeds head gradients from the loss and runs the tape.
  void backward(ForwardPass& pass, const DenseGrads& grads);

  void zero_grads();
  std::vector<ParamBlock*> params();
  std::size_t parameter_count();
  std::size_t subnet_parameter_count();

 private:
  struct Block {
    Conv2d conv;
    BatchNorm bn;
  };
  struct HeadSet {
    Conv2d verb;
    Conv2d target;
    Conv2d embedding;
  };

  VarPtr run_block(Block& b, Tape& tape, const VarPtr& x, OpCounter* ops);
  ForwardPass run(const Tensor& image, OpCounter* ops, bool training);
  int subnet_copies() const { return config_.share_weights_across_levels ? 1 : config_.pyramid_levels(); }

  NetworkConfig config_;
  std::vector<Block> encoder_;             // stages at levels 1..level_max
  std::vector<Conv2d> laterals_;           // per pyramid level
  std::vector<Conv2d> smooth_;             // per pyramid level
  std::vector<std::vector<Block>> subnet_; // [copy][block]
  std::vector<HeadSet> heads_;             // [copy]
};

/// Converts an 8-bit raster to a float tensor in [0,1], optionally mirrored.
Tensor image_to_tensor(const Image& image, bool horizontal_flip = false);

}  // namespace calipso::net
