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

#include "calipso/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace calipso {

std::vector<Detection> DetectorAdapter::detect(const Scene& scene, std::mt19937_64& rng) const {
  std::vector<Detection> out;
  switch (mode) {
    case Mode::kGroundTruth:
      for (const auto& b : scene.boxes) out.push_back({b, b.class_id, 1.0});
      break;
    case Mode::kNoisySimulated: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (const auto& b : scene.boxes) {
        if (unit(rng) < drop_rate) continue;
        Detection d;
        d.box = b;
        std::normal_distribution<double> nx(0.0, jitter * b.width());
        std::normal_distribution<double> ny(0.0, jitter * b.height());
        d.box.x_min += nx(rng);
        d.box.x_max += nx(rng);
        d.box.y_min += ny(rng);
        d.box.y_max += ny(rng);
        if (d.box.x_min >= d.box.x_max) std::swap(d.box.x_min, d.box.x_max);
        if (d.box.y_min >= d.box.y_max) std::swap(d.box.y_min, d.box.y_max);
        d.class_id = b.class_id;
        if (b.class_id != scene.human_class_id && unit(rng) < misclass_rate)
          d.class_id = 1 + static_cast<int>(unit(rng) * 4);
        d.box.class_id = d.class_id;
        d.score = score_floor + (1.0 - score_floor) * unit(rng);
        out.push_back(d);
      }
      break;
    }
    case Mode::kExternalImport:
      out = imported;
      break;
  }
  return out;
}

BoxToAnchor map_box_to_anchor(const Box& box, const AnchorGrid& grid) {
  BoxToAnchor best;
  // Flat scan in index order: levels ascend, so the strict > keeps the
  // lowest level and lowest flat index on ties.
  for (int a = 0; a < grid.total(); ++a) {
    const double v = iou(grid.anchor_box(a), box);
    if (v > best.iou) {
      best.iou = v;
      best.anchor = a;
    }
  }
  if (best.anchor < 0) best.anchor = 0;  // degenerate box: IoU 0 everywhere
  return best;
}

double connection_score(const std::vector<double>& e_h, const std::vector<double>& e_o,
                        EmbeddingNorm norm) {
  if (e_h.size() != e_o.size())
    throw std::invalid_argument("connection_score: dimension mismatch");
  double dist = 0;
  if (norm == EmbeddingNorm::kL2) {
    for (std::size_t i = 0; i < e_h.size(); ++i) {
      const double d = e_h[i] - e_o[i];
      dist += d * d;
    }
    dist = std::sqrt(dist);
  } else {
    for (std::size_t i = 0; i < e_h.size(); ++i) dist += std::abs(e_h[i] - e_o[i]);
  }
  return std::exp(-dist);
}

double triplet_score(double s_h_det, double s_active, double s_o_det, double s_passive,
                     double s_target, double s_emb) {
  return std::pow(s_h_det * s_active * s_o_det * s_passive * s_target * s_emb, 1.0 / 6.0);
}

double pair_score(double s_h_det, double s_active, double s_target) {
  return std::cbrt(s_h_det * s_active * (1.0 - s_target));
}

namespace {

struct MappedDetection {
  const Detection* det;
  AnchorLocation loc;
  double map_iou;
};

std::vector<double> read_embedding(const DenseLevel& lev, const AnchorLocation& loc, int verb) {
  std::vector<float> tmp(lev.embedding_dim);
  lev.embedding(loc.x, loc.y, loc.shape, verb, tmp.data());
  return std::vector<double>(tmp.begin(), tmp.end());
}

}  // namespace

std::vector<ScoredTriplet> score_detections(const DenseOutputs& dense, const AnchorGrid& grid,
                                            const std::vector<Detection>& detections,
                                            const VerbVocabulary& vocabulary,
                                            const InferenceOptions& options,
                                            InferenceStats* stats) {
  std::vector<ScoredTriplet> out;
  if (detections.empty()) return out;

  const bool passive_on = dense.levels.front().passive_enabled;
  const bool target_on = dense.levels.front().target_enabled;

  std::vector<MappedDetection> humans, objects;
  std::set<int> touched;
  for (const auto& d : detections) {
    const BoxToAnchor m = map_box_to_anchor(d.box, grid);
    MappedDetection md{&d, grid.locate(m.anchor), m.iou};
    touched.insert(m.anchor);
    if (stats && m.iou < options.low_iou_flag) ++stats->low_iou_mappings;
    // Humans never serve as targets.
    if (d.class_id == options.human_class_id)
      humans.push_back(md);
    else
      objects.push_back(md);
  }

  const int V = vocabulary.size();
  for (const auto& h : humans) {
    const DenseLevel& hl = dense.levels[h.loc.level_index];
    for (int v = 0; v < V; ++v) {
      const double s_active = hl.active_score(h.loc.x, h.loc.y, h.loc.shape, v);
      const double s_target =
          target_on ? hl.target_score(h.loc.x, h.loc.y, h.loc.shape, v, options.target_role)
                    : 0.0;
      const auto e_h = read_embedding(hl, h.loc, v);

      ScoredTriplet best;
      best.verb_id = v;
      best.score = -1.0;

      if (!vocabulary.targetless(v)) {
        for (const auto& o : objects) {
          const DenseLevel& ol = dense.levels[o.loc.level_index];
          const auto e_o = read_embedding(ol, o.loc, v);
          const double s_emb = connection_score(e_h, e_o, options.norm);
          // Disabled heads drop their factor from the geometric mean.
          double product = h.det->score * s_active * o.det->score * s_emb;
          int factors = 4;
          if (passive_on) {
            product *= ol.passive_score(o.loc.x, o.loc.y, o.loc.shape, v);
            ++factors;
          }
          if (target_on) {
            product *= s_target;
            ++factors;
          }
          const double score = std::pow(product, 1.0 / factors);
          if (stats) ++stats->score_evaluations;
          if (score > best.score) {
            best.score = score;
            best.subject = h.det->box;
            best.target = o.det->box;
            best.kind = PredictionKind::kTriplet;
          }
        }
      }

      {
        double product = h.det->score * s_active;
        int factors = 2;
        if (target_on) {
          product *= (1.0 - s_target);
          ++factors;
        }
        const double score = std::pow(product, 1.0 / factors);
        if (stats) ++stats->score_evaluations;
        if (score > best.score) {
          best.score = score;
          best.subject = h.det->box;
          best.target.reset();
          best.kind = PredictionKind::kPair;
        }
      }

      if (best.score > options.threshold) out.push_back(best);
    }
  }

  if (stats) stats->touched_anchors.assign(touched.begin(), touched.end());
  return out;
}

std::vector<ScoredTriplet> detect_interactions(net::InteractionModel& model, const Image& image,
                                               const std::vector<Detection>& detections,
                                               const VerbVocabulary& vocabulary,
                                               const AnchorGridConfig& grid_config,
                                               const InferenceOptions& options,
                                               InferenceStats* stats) {
  if (detections.empty()) return {};
  const AnchorGrid grid(image.width, image.height, grid_config);
  net::OpCounter ops;
  const DenseOutputs dense = model.forward(net::image_to_tensor(image), &ops);
  if (stats) {
    stats->forward_passes += 1;
    stats->forward_ops = ops.macs;
  }
  return score_detections(dense, grid, detections, vocabulary, options, stats);
}

}  // namespace calipso
