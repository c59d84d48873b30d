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

#include "calipso/losses.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace calipso {

namespace {

// Gamma weight matrix over class pairs: gamma_push iff both classes contain a
// usual-target object, necessarily of distinct boxes since classes partition
// the anchors box-wise.
std::vector<std::uint8_t> usual_target_flags(const EmbeddingBatch& batch, int verb_id,
                                             const LossConfig& config) {
  std::vector<std::uint8_t> has_lv(batch.classes.size(), 0);
  for (std::size_t c = 0; c < batch.classes.size(); ++c)
    for (int r : batch.classes[c])
      if (config.usual_target(verb_id, batch.label_of_row[r])) {
        has_lv[c] = 1;
        break;
      }
  return has_lv;
}

bool distinct_usual_boxes(const EmbeddingBatch& batch, int verb_id, const LossConfig& config,
                          int ci, int cj) {
  for (int r : batch.classes[ci]) {
    if (!config.usual_target(verb_id, batch.label_of_row[r])) continue;
    for (int s : batch.classes[cj]) {
      if (!config.usual_target(verb_id, batch.label_of_row[s])) continue;
      if (batch.box_of_row[r] != batch.box_of_row[s]) return true;
    }
  }
  return false;
}

double sq_dist(const double* a, const double* b, int dim) {
  double d = 0;
  for (int t = 0; t < dim; ++t) {
    const double diff = a[t] - b[t];
    d += diff * diff;
  }
  return d;
}

double clamp_prob(double p, double eps) { return std::min(std::max(p, eps), 1.0 - eps); }

}  // namespace

std::vector<double> class_reference(const EmbeddingBatch& batch, int class_index) {
  const auto& members = batch.classes.at(class_index);
  if (members.empty()) throw std::invalid_argument("class_reference: empty equivalence class");
  std::vector<double> mean(batch.dim, 0.0);
  for (int r : members) {
    const double* e = batch.row(r);
    for (int t = 0; t < batch.dim; ++t) mean[t] += e[t];
  }
  for (double& m : mean) m /= static_cast<double>(members.size());
  return mean;
}

double pull_loss(const EmbeddingBatch& batch, const LossConfig& config) {
  const int E = static_cast<int>(batch.classes.size());
  if (E == 0) return 0.0;
  double loss = 0.0;
  for (int c = 0; c < E; ++c) {
    const auto mean = class_reference(batch, c);
    const double lambda = batch.interacting[c] ? config.lambda_pull : 1.0;
    double acc = 0.0;
    for (int r : batch.classes[c]) acc += sq_dist(batch.row(r), mean.data(), batch.dim);
    loss += lambda * acc / static_cast<double>(batch.classes[c].size());
  }
  return loss / E;
}

double pull_loss_grad(const EmbeddingBatch& batch, const LossConfig& config,
                      std::vector<double>& grad) {
  const int E = static_cast<int>(batch.classes.size());
  if (E == 0) return 0.0;
  double loss = 0.0;
  for (int c = 0; c < E; ++c) {
    const auto mean = class_reference(batch, c);
    const double lambda = batch.interacting[c] ? config.lambda_pull : 1.0;
    const double size = static_cast<double>(batch.classes[c].size());
    double acc = 0.0;
    // The mean-dependence cancels: sum_j (e_j - mean) = 0, so the gradient of
    // the class term at member k is simply 2*(e_k - mean).
    const double scale = lambda / (size * E);
    for (int r : batch.classes[c]) {
      const double* e = batch.row(r);
      double* g = grad.data() + static_cast<std::size_t>(r) * batch.dim;
      for (int t = 0; t < batch.dim; ++t) {
        const double diff = e[t] - mean[t];
        acc += diff * diff;
        g[t] += scale * 2.0 * diff;
      }
    }
    loss += lambda * acc / size;
  }
  return loss / E;
}

double push_loss(const EmbeddingBatch& batch, int verb_id, const LossConfig& config) {
  const int E = static_cast<int>(batch.classes.size());
  if (E <= 1) return 0.0;
  const auto has_lv = usual_target_flags(batch, verb_id, config);
  std::vector<std::vector<double>> refs(E);
  for (int c = 0; c < E; ++c) refs[c] = class_reference(batch, c);

  const double inv_two_sigma_sq = 1.0 / (2.0 * config.sigma * config.sigma);
  double loss = 0.0;
  for (int i = 0; i < E; ++i) {
    for (int j = i + 1; j < E; ++j) {
      double gamma = 1.0;
      if (has_lv[i] && has_lv[j] && distinct_usual_boxes(batch, verb_id, config, i, j))
        gamma = config.gamma_push;
      const double kern = std::exp(-sq_dist(refs[i].data(), refs[j].data(), batch.dim) *
                                   inv_two_sigma_sq);
      loss += 2.0 * gamma * kern;  // both ordered pairs (i,j) and (j,i)
    }
  }
  if (config.symmetric_halving) loss *= 0.5;
  return loss / (static_cast<double>(E) * E);
}

double push_loss_grad(const EmbeddingBatch& batch, int verb_id, const LossConfig& config,
                      std::vector<double>& grad) {
  const int E = static_cast<int>(batch.classes.size());
  if (E <= 1) return 0.0;
  const auto has_lv = usual_target_flags(batch, verb_id, config);
  std::vector<std::vector<double>> refs(E);
  for (int c = 0; c < E; ++c) refs[c] = class_reference(batch, c);

  const double inv_two_sigma_sq = 1.0 / (2.0 * config.sigma * config.sigma);
  const double pair_weight = config.symmetric_halving ? 1.0 : 2.0;
  const double norm = 1.0 / (static_cast<double>(E) * E);

  double loss = 0.0;
  std::vector<double> dref(static_cast<std::size_t>(E) * batch.dim, 0.0);
  for (int i = 0; i < E; ++i) {
    for (int j = i + 1; j < E; ++j) {
      double gamma = 1.0;
      if (has_lv[i] && has_lv[j] && distinct_usual_boxes(batch, verb_id, config, i, j))
        gamma = config.gamma_push;
      const double d2 = sq_dist(refs[i].data(), refs[j].data(), batch.dim);
      const double kern = std::exp(-d2 * inv_two_sigma_sq);
      loss += pair_weight * gamma * kern;
      const double coeff = -pair_weight * gamma * kern * norm * 2.0 * inv_two_sigma_sq;
      for (int t = 0; t < batch.dim; ++t) {
        const double diff = refs[i][t] - refs[j][t];
        dref[static_cast<std::size_t>(i) * batch.dim + t] += coeff * diff;
        dref[static_cast<std::size_t>(j) * batch.dim + t] -= coeff * diff;
      }
    }
  }
  // Chain through the class means.
  for (int c = 0; c < E; ++c) {
    const double inv_size = 1.0 / static_cast<double>(batch.classes[c].size());
    for (int r : batch.classes[c]) {
      double* g = grad.data() + static_cast<std::size_t>(r) * batch.dim;
      for (int t = 0; t < batch.dim; ++t)
        g[t] += dref[static_cast<std::size_t>(c) * batch.dim + t] * inv_size;
    }
  }
  return loss * norm;
}

DenseGrads DenseGrads::zeros_like(const DenseOutputs& dense) {
  DenseGrads g;
  g.levels.resize(dense.levels.size());
  for (std::size_t l = 0; l < dense.levels.size(); ++l) {
    g.levels[l].verb.assign(dense.levels[l].verb_scores.size(), 0.0f);
    g.levels[l].target.assign(dense.levels[l].target_scores.size(), 0.0f);
    g.levels[l].embeddings.assign(dense.levels[l].embeddings.size(), 0.0f);
  }
  return g;
}

namespace {

// Sum of clamped BCE over a set of (value, label) channel reads, plus the
// d(loss)/d(logit) entries when grads are requested. The logit gradient of
// clamped BCE through the sigmoid is (p - y).
struct BceAccum {
  double sum = 0;
  std::size_t count = 0;

  void add(double p, double y, double eps) {
    p = clamp_prob(p, eps);
    sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    ++count;
  }
};

}  // namespace

double verb_loss(const DenseOutputs& dense, const std::vector<VerbLabels>& labels,
                 const LossConfig& config, DenseGrads* grads) {
  if (labels.empty() && !config.include_background) {
    std::cerr << "calipso: verb loss evaluated with no labeled anchors\n";
    return 0.0;
  }
  BceAccum acc;
  // First pass counts channels so the gradient carries the final 1/N.
  std::size_t total_channels = 0;
  for (const auto& rec : labels) {
    const DenseLevel& lev = dense.levels[rec.at.level_index];
    total_channels += lev.verb_channels_per_anchor();
  }
  if (config.include_background) {
    std::size_t all = 0;
    for (const auto& lev : dense.levels)
      all += lev.plane() * lev.anchors * lev.verb_channels_per_anchor();
    total_channels = all;
  }
  if (total_channels == 0) {
    std::cerr << "calipso: verb loss evaluated with no labeled anchors\n";
    return 0.0;
  }
  const double inv_n = 1.0 / static_cast<double>(total_channels);

  std::vector<std::vector<std::uint8_t>> touched;  // background bookkeeping
  if (config.include_background) {
    touched.resize(dense.levels.size());
    for (std::size_t l = 0; l < dense.levels.size(); ++l)
      touched[l].assign(dense.levels[l].verb_scores.size(), 0);
  }

  for (const auto& rec : labels) {
    const DenseLevel& lev = dense.levels[rec.at.level_index];
    const int per_anchor = lev.verb_channels_per_anchor();
    for (int ch = 0; ch < per_anchor; ++ch) {
      const bool is_passive = ch >= lev.verbs;
      const int v = is_passive ? ch - lev.verbs : ch;
      const double y = is_passive ? rec.passive[v] : rec.active[v];
      const std::size_t at = lev.idx(rec.at.shape * per_anchor + ch, rec.at.x, rec.at.y);
      const double p = clamp_prob(lev.verb_scores[at], config.bce_epsilon);
      acc.add(p, y, config.bce_epsilon);
      if (grads) grads->levels[rec.at.level_index].verb[at] += static_cast<float>((p - y) * inv_n);
      if (config.include_background) touched[rec.at.level_index][at] = 1;
    }
  }

  if (config.include_background) {
    for (std::size_t l = 0; l < dense.levels.size(); ++l) {
      const auto& scores = dense.levels[l].verb_scores;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        if (touched[l][i]) continue;
        const double p = clamp_prob(scores[i], config.bce_epsilon);
        acc.add(p, 0.0, config.bce_epsilon);
        if (grads) grads->levels[l].verb[i] += static_cast<float>(p * inv_n);
      }
    }
  }
  return acc.sum * inv_n;
}

double target_presence_loss(const DenseOutputs& dense, const std::vector<TargetLabels>& labels,
                            const LossConfig& config, DenseGrads* grads) {
  if (labels.empty()) {
    std::cerr << "calipso: target presence loss evaluated with no labeled anchors\n";
    return 0.0;
  }
  std::size_t total_channels = 0;
  for (const auto& rec : labels) total_channels += rec.presence.size();
  const double inv_n = 1.0 / static_cast<double>(total_channels);

  BceAccum acc;
  for (const auto& rec : labels) {
    const DenseLevel& lev = dense.levels[rec.at.level_index];
    const int channels = 2 * lev.verbs;
    for (int ch = 0; ch < channels; ++ch) {
      const double y = rec.presence[ch];
      const std::size_t at = lev.idx(rec.at.shape * channels + ch, rec.at.x, rec.at.y);
      const double p = clamp_prob(lev.target_scores[at], config.bce_epsilon);
      acc.add(p, y, config.bce_epsilon);
      if (grads)
        grads->levels[rec.at.level_index].target[at] += static_cast<float>((p - y) * inv_n);
    }
  }
  return acc.sum * inv_n;
}

double total_loss(double verb, double target, const std::vector<double>& per_verb_embedding,
                  int verb_count) {
  double emb_sum = 0;
  for (double e : per_verb_embedding) emb_sum += e;
  const double total = verb + target + emb_sum / static_cast<double>(verb_count);
  if (!std::isfinite(total))
    throw std::runtime_error("total_loss: non-finite loss (training bug)");
  return total;
}

}  // namespace calipso
