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
#include <vector>

#include "calipso/inference.hpp"
#include "calipso/net/layers.hpp"
#include "calipso/types.hpp"

namespace calipso {

/// Reference pipeline with the classical per-pair cost profile: every
/// (human, object) candidate pair gets one crop-level subnetwork evaluation,
/// so the forward cost grows linearly with the number of processed pairs.
/// It exists to contrast with the single-shot path in the complexity
/// benchmark; it emits functionally comparable ScoredTriplet records.
class PairwiseBaseline {
 public:
  struct Config {
    int crop_size = 64;  // union-window crop, resized to crop_size^2
    int width = 24;      // first conv width
    std::uint64_t seed = 99;
  };

  PairwiseBaseline(const Config& config, int verbs);

  /// One subnetwork evaluation per (human, object) pair: exactly N*M of them.
  std::vector<ScoredTriplet> detect(const Image& image,
                                    const std::vector<Detection>& detections,
                                    const VerbVocabulary& vocabulary, double threshold,
                                    net::OpCounter* ops = nullptr, int* pair_evals = nullptr,
                                    int human_class_id = 0);

  /// Forward cost of a single pair evaluation, in multiply-accumulates.
  std::uint64_t ops_per_pair();

 private:
  std::vector<double> score_pair(const Image& image, const Box& subject, const Box& target,
                                 net::OpCounter* ops);

  Config config_;
  int verbs_ = 0;
  net::Conv2d conv1_, conv2_, conv3_, conv4_;
  net::Conv2d fc_;  // 1x1 conv on the pooled feature
};

}  // namespace calipso
