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

#include "calipso/pairwise.hpp"

#include <algorithm>
#include <cmath>

namespace calipso {

using net::OpCounter;
using net::Tape;
using net::Tensor;
using net::VarPtr;

PairwiseBaseline::PairwiseBaseline(const Config& config, int verbs)
    : config_(config), verbs_(verbs) {
  std::mt19937_64 rng(config.seed);
  const int w = config.width;
  conv1_.init(5, w, 3, 2, 1, "pairwise.conv1", rng);
  conv2_.init(w, 2 * w, 3, 2, 1, "pairwise.conv2", rng);
  conv3_.init(2 * w, 2 * w, 3, 2, 1, "pairwise.conv3", rng);
  conv4_.init(2 * w, 2 * w, 3, 1, 1, "pairwise.conv4", rng);
  fc_.init(2 * w, verbs, 1, 1, 0, "pairwise.fc", rng);
}

std::vector<double> PairwiseBaseline::score_pair(const Image& image, const Box& subject,
                                                 const Box& target, OpCounter* ops) {
  const int S = config_.crop_size;
  // Union window with 10% margin, resampled to a fixed-size patch: image
  // channels plus one mask plane per box.
  Box u;
  u.x_min = std::min(subject.x_min, target.x_min);
  u.y_min = std::min(subject.y_min, target.y_min);
  u.x_max = std::max(subject.x_max, target.x_max);
  u.y_max = std::max(subject.y_max, target.y_max);
  const double mx = 0.1 * u.width(), my = 0.1 * u.height();
  u.x_min -= mx;
  u.x_max += mx;
  u.y_min -= my;
  u.y_max += my;

  Tensor patch(5, S, S);
  for (int y = 0; y < S; ++y) {
    const double sy = u.y_min + (y + 0.5) / S * u.height();
    for (int x = 0; x < S; ++x) {
      const double sx = u.x_min + (x + 0.5) / S * u.width();
      const int ix = static_cast<int>(sx), iy = static_cast<int>(sy);
      if (ix >= 0 && iy >= 0 && ix < image.width && iy < image.height)
        for (int c = 0; c < 3; ++c) patch.at(c, y, x) = image.at(ix, iy, c) / 255.0f;
      patch.at(3, y, x) =
          (sx >= subject.x_min && sx <= subject.x_max && sy >= subject.y_min &&
           sy <= subject.y_max)
              ? 1.0f
              : 0.0f;
      patch.at(4, y, x) =
          (sx >= target.x_min && sx <= target.x_max && sy >= target.y_min && sy <= target.y_max)
              ? 1.0f
              : 0.0f;
    }
  }
  if (ops) ops->macs += patch.size();  // resampling cost

  Tape tape;  // inference only
  VarPtr x = net::make_var(std::move(patch));
  x = net::relu(tape, conv1_.forward(tape, x, ops));
  x = net::relu(tape, conv2_.forward(tape, x, ops));
  x = net::relu(tape, conv3_.forward(tape, x, ops));
  x = net::relu(tape, conv4_.forward(tape, x, ops));
  x = net::global_avg_pool(tape, x, ops);
  x = fc_.forward(tape, x, ops);

  std::vector<double> scores(verbs_);
  for (int v = 0; v < verbs_; ++v) scores[v] = 1.0 / (1.0 + std::exp(-x->value.v[v]));
  return scores;
}

std::uint64_t PairwiseBaseline::ops_per_pair() {
  Image dummy;
  dummy.width = dummy.height = config_.crop_size;
  dummy.channels = 3;
  dummy.data.assign(static_cast<std::size_t>(config_.crop_size) * config_.crop_size * 3, 0);
  Box a{0, 0, 10, 10, 0}, b{20, 20, 30, 30, 1};
  OpCounter ops;
  score_pair(dummy, a, b, &ops);
  return ops.macs;
}

std::vector<ScoredTriplet> PairwiseBaseline::detect(const Image& image,
                                                    const std::vector<Detection>& detections,
                                                    const VerbVocabulary& vocabulary,
                                                    double threshold, OpCounter* ops,
                                                    int* pair_evals, int human_class_id) {
  std::vector<const Detection*> humans, objects;
  for (const auto& d : detections)
    (d.class_id == human_class_id ? humans : objects).push_back(&d);

  if (pair_evals) *pair_evals = 0;
  std::vector<ScoredTriplet> out;
  for (const auto* h : humans) {
    std::vector<std::vector<double>> pair_scores;  // per object, per verb
    for (const auto* o : objects) {
      pair_scores.push_back(score_pair(image, h->box, o->box, ops));
      if (pair_evals) ++*pair_evals;
    }
    for (int v = 0; v < vocabulary.size(); ++v) {
      if (vocabulary.targetless(v)) continue;
      ScoredTriplet best;
      best.verb_id = v;
      best.score = -1;
      for (std::size_t j = 0; j < objects.size(); ++j) {
        const double s = std::cbrt(h->score * objects[j]->score * pair_scores[j][v]);
        if (s > best.score) {
          best.score = s;
          best.subject = h->box;
          best.target = objects[j]->box;
          best.kind = PredictionKind::kTriplet;
        }
      }
      if (best.score > threshold) out.push_back(best);
    }
  }
  return out;
}

}  // namespace calipso
