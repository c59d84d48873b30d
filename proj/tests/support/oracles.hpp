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
//
// Test-only oracles, deliberately naive and independent of the library's
// implementation paths: finite differences for loss gradients, cubic-time
// transitive closure for the anchor partition, and an exhaustive
// precision/recall enumeration for average precision.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "calipso/anchors.hpp"
#include "calipso/eval.hpp"
#include "calipso/losses.hpp"
#include "calipso/types.hpp"

namespace calipso::testing {

struct RowSpec {
  std::vector<double> e;
  int box = 0;
  int label = 0;
};

/// Builds a loss instance from explicit per-class rows.
inline EmbeddingBatch make_batch(const std::vector<std::vector<RowSpec>>& classes,
                                 const std::vector<bool>& interacting = {}) {
  EmbeddingBatch b;
  b.dim = static_cast<int>(classes.front().front().e.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<int> rows;
    for (const auto& spec : classes[c]) {
      rows.push_back(b.n_rows());
      for (double x : spec.e) b.rows.push_back(x);
      b.box_of_row.push_back(spec.box);
      b.label_of_row.push_back(spec.label);
    }
    b.classes.push_back(std::move(rows));
    b.interacting.push_back(c < interacting.size() ? static_cast<bool>(interacting[c]) : false);
  }
  return b;
}

/// Random small instance: up to `max_classes` classes of up to `max_members`
/// anchors, embedding dimension up to `max_dim`. Box ids are distinct per
/// class; labels are drawn from {1..4}.
inline EmbeddingBatch random_batch(std::mt19937_64& rng, int max_classes = 5,
                                   int max_members = 4, int max_dim = 4) {
  std::uniform_int_distribution<int> n_classes(1, max_classes);
  std::uniform_int_distribution<int> n_members(1, max_members);
  std::uniform_int_distribution<int> dim_dist(1, max_dim);
  std::uniform_int_distribution<int> label_dist(1, 4);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int E = n_classes(rng);
  const int dim = dim_dist(rng);
  std::vector<std::vector<RowSpec>> classes(E);
  std::vector<bool> interacting(E);
  for (int c = 0; c < E; ++c) {
    const int members = n_members(rng);
    for (int m = 0; m < members; ++m) {
      RowSpec spec;
      spec.e.resize(dim);
      for (double& x : spec.e) x = value(rng);
      spec.box = c * 2 + (m % 2);  // classes may span two boxes
      spec.label = label_dist(rng);
      classes[c].push_back(spec);
    }
    interacting[c] = unit(rng) < 0.5;
  }
  return make_batch(classes, interacting);
}

/// Central finite differences of a scalar function of the batch rows.
inline std::vector<double> finite_difference_grad(
    EmbeddingBatch batch, const std::function<double(const EmbeddingBatch&)>& f,
    double step = 1e-4) {
  std::vector<double> grad(batch.rows.size());
  for (std::size_t i = 0; i < batch.rows.size(); ++i) {
    const double saved = batch.rows[i];
    batch.rows[i] = saved + step;
    const double up = f(batch);
    batch.rows[i] = saved - step;
    const double down = f(batch);
    batch.rows[i] = saved;
    grad[i] = (up - down) / (2 * step);
  }
  return grad;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// O(n^3) transitive closure of the per-verb relation over assigned anchors:
/// same assigned box, or boxes linked by a matching triplet.
inline std::vector<std::vector<int>> closure_partition(
    const AnchorAssignment& assignment, const std::vector<InteractionTriplet>& triplets,
    int verb) {
  const auto& anchors = assignment.assigned;
  const int n = static_cast<int>(anchors.size());
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    rel[i][i] = true;
    for (int j = 0; j < n; ++j) {
      const int bi = assignment.box_of_anchor[anchors[i]];
      const int bj = assignment.box_of_anchor[anchors[j]];
      if (bi == bj) rel[i][j] = true;
      for (const auto& t : triplets) {
        if (t.verb_id != verb || !t.target_index) continue;
        const int s = t.subject_index, o = *t.target_index;
        if ((bi == s && bj == o) || (bi == o && bj == s)) rel[i][j] = true;
      }
    }
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rel[i][k] && rel[k][j]) rel[i][j] = true;

  std::vector<std::vector<int>> classes;
  std::vector<bool> done(n, false);
  for (int i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<int> cls;
    for (int j = 0; j < n; ++j)
      if (rel[i][j]) {
        cls.push_back(anchors[j]);
        done[j] = true;
      }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  std::sort(classes.begin(), classes.end());
  return classes;
}

/// Exhaustive AP oracle: re-sorts, re-matches greedily and integrates the
/// interpolated precision envelope, written as plainly as possible.
inline double ap_oracle_for_verb(const std::vector<ScenePredictions>& predictions,
                                 const std::vector<Scene>& scenes, int verb,
                                 double iou_threshold = 0.5) {
  struct Entry {
    double score;
    int scene;
    const ScoredTriplet* p;
    std::size_t order;
  };
  std::vector<Entry> entries;
  std::size_t order = 0;
  for (const auto& sp : predictions)
    for (const auto& p : sp.predictions) {
      if (p.verb_id == verb) entries.push_back({p.score, sp.scene_index, &p, order});
      ++order;
    }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });

  std::size_t n_gt = 0;
  std::map<std::pair<int, int>, bool> taken;  // (scene, triplet index)
  for (std::size_t s = 0; s < scenes.size(); ++s)
    for (std::size_t t = 0; t < scenes[s].triplets.size(); ++t)
      if (scenes[s].triplets[t].verb_id == verb) {
        taken[{static_cast<int>(s), static_cast<int>(t)}] = false;
        ++n_gt;
      }
  if (n_gt == 0) return -1;

  std::vector<int> tp_flags;
  for (const auto& e : entries) {
    bool matched = false;
    const Scene& scene = scenes[e.scene];
    double best_quality = -1;
    int best_t = -1;
    for (std::size_t t = 0; t < scene.triplets.size(); ++t) {
      const auto& gt = scene.triplets[t];
      if (gt.verb_id != verb || taken[{e.scene, static_cast<int>(t)}]) continue;
      if (iou(e.p->subject, scene.boxes[gt.subject_index]) <= iou_threshold) continue;
      const bool want_target = gt.target_index.has_value();
      const bool have_target = e.p->target.has_value();
      if (want_target != have_target) continue;
      double quality = iou(e.p->subject, scene.boxes[gt.subject_index]);
      if (want_target) {
        const double ti = iou(*e.p->target, scene.boxes[*gt.target_index]);
        if (ti <= iou_threshold) continue;
        quality = std::min(quality, ti);
      }
      if (quality > best_quality) {
        best_quality = quality;
        best_t = static_cast<int>(t);
      }
    }
    if (best_t >= 0) {
      taken[{e.scene, best_t}] = true;
      matched = true;
    }
    tp_flags.push_back(matched ? 1 : 0);
  }

  // Integrate sum over ranks where recall increases of the best precision at
  // or beyond that rank.
  double ap = 0;
  int tp = 0;
  for (std::size_t k = 0; k < tp_flags.size(); ++k) {
    if (!tp_flags[k]) continue;
    ++tp;
    double best_prec = 0;
    int tp2 = 0;
    for (std::size_t m = 0; m < tp_flags.size(); ++m) {
      tp2 += tp_flags[m];
      if (m >= k) best_prec = std::max(best_prec, static_cast<double>(tp2) / (m + 1));
    }
    ap += best_prec / static_cast<double>(n_gt);
  }
  return ap;
}

}  // namespace calipso::testing
