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
#include <map>
#include <set>
#include <vector>

#include "calipso/types.hpp"

namespace calipso {

/// Weights of the metric-learning terms and the per-verb usual-target sets.
struct LossConfig {
  double sigma = 2.0;        // push kernel width
  double lambda_pull = 10.0; // pull weight on interacting classes
  double gamma_push = 100.0; // push weight on confusable class pairs
  std::map<int, std::set<int>> usual_targets;  // verb id -> object classes seen as its targets

  bool symmetric_halving = false;   // sum unordered class pairs instead of ordered ones
  bool include_background = false;  // score BCE over unassigned anchors with zero labels
  double bce_epsilon = 1e-7;

  bool usual_target(int verb, int class_id) const {
    auto it = usual_targets.find(verb);
    return it != usual_targets.end() && it->second.count(class_id) > 0;
  }
};

/// Compacted per-verb embedding instance: one row per assigned anchor of the
/// verb's partition, plus the class structure over the rows. Decoupled from
/// the dense maps so the losses are testable in isolation.
struct EmbeddingBatch {
  int dim = 0;                             // T
  std::vector<double> rows;                // n x dim, row-major
  std::vector<int> box_of_row;             // ground-truth box per row
  std::vector<int> label_of_row;           // object class of that box
  std::vector<std::vector<int>> classes;   // row indices per equivalence class
  std::vector<bool> interacting;           // per class

  int n_rows() const { return dim > 0 ? static_cast<int>(rows.size()) / dim : 0; }
  const double* row(int i) const { return rows.data() + static_cast<std::size_t>(i) * dim; }
};

/// Mean embedding of one equivalence class (its reference vector).
std::vector<double> class_reference(const EmbeddingBatch& batch, int class_index);

/// Pull term: mean over classes of the lambda-weighted mean squared distance
/// of members to their class reference. Squared distance is the squared
/// Euclidean norm over the embedding coordinates.
double pull_loss(const EmbeddingBatch& batch, const LossConfig& config);

/// Push term: Gaussian-kernel repulsion between class references, summed over
/// ordered pairs (i != j) and normalized by the squared class count, with the
/// gamma weight on pairs of classes that both hold usual-target objects of
/// distinct boxes. A single class yields 0.
double push_loss(const EmbeddingBatch& batch, int verb_id, const LossConfig& config);

/// Same losses with analytic gradients accumulated into `grad`
/// (n_rows x dim, row-major; caller zeroes it).
double pull_loss_grad(const EmbeddingBatch& batch, const LossConfig& config,
                      std::vector<double>& grad);
double push_loss_grad(const EmbeddingBatch& batch, int verb_id, const LossConfig& config,
                      std::vector<double>& grad);

/// Where an anchor's channels live in the dense maps.
struct AnchorRef {
  int anchor = -1;  // flat grid index
  int level_index = 0;
  int x = 0, y = 0, shape = 0;
};

/// Active/passive verb targets for one assigned anchor (V entries each).
struct VerbLabels {
  AnchorRef at;
  std::vector<std::uint8_t> active;
  std::vector<std::uint8_t> passive;
};

/// Target-presence targets for one assigned human anchor (2V entries,
/// channel = 2*verb + role).
struct TargetLabels {
  AnchorRef at;
  std::vector<std::uint8_t> presence;
};

/// Gradients with respect to the dense maps, same layout as DenseOutputs.
/// Score-map entries are d(loss)/d(logit); embedding entries d(loss)/d(e).
struct DenseGrads {
  struct Level {
    std::vector<float> verb;
    std::vector<float> target;
    std::vector<float> embeddings;
  };
  std::vector<Level> levels;

  static DenseGrads zeros_like(const DenseOutputs& dense);
};

/// Multi-label BCE over the verb channels of the labeled anchors (subject
/// anchors carry active labels, target anchors passive ones). Optionally adds
/// every unlabeled anchor with all-zero labels. Returns 0 (with a warning)
/// when nothing is labeled.
double verb_loss(const DenseOutputs& dense, const std::vector<VerbLabels>& labels,
                 const LossConfig& config, DenseGrads* grads = nullptr);

/// BCE over the 2V target-presence channels of the labeled human anchors.
double target_presence_loss(const DenseOutputs& dense, const std::vector<TargetLabels>& labels,
                            const LossConfig& config, DenseGrads* grads = nullptr);

/// Per-step loss decomposition; total follows the fixed combination
/// verb + target + mean-over-verbs embedding.
struct LossReport {
  double verb_loss = 0;
  double target_loss = 0;
  double embedding_loss = 0;  // mean over verbs of pull+push
  double total = 0;
  std::vector<double> pull_per_verb;
  std::vector<double> push_per_verb;
};

/// Exact total: verb + target + (1/V) * sum of per-verb embedding losses.
/// Throws on non-finite inputs (training bug).
double total_loss(double verb, double target, const std::vector<double>& per_verb_embedding,
                  int verb_count);

}  // namespace calipso
