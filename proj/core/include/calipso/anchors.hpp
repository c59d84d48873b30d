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
#include <numeric>
#include <vector>

#include "calipso/types.hpp"

namespace calipso {

/// Anchor lattice configuration. The anchor set at each feature-map cell is
/// the cartesian product scales x ratios; base side is base_scale * stride.
struct AnchorGridConfig {
  int level_min = 3;
  int level_max = 5;
  std::vector<double> scales = {1.0, 1.259921049894873, 1.5874010519681994};  // 2^(k/3)
  std::vector<double> ratios = {0.5, 1.0, 2.0};  // h/w
  double base_scale = 3.0;  // anchor side = base_scale * stride at unit scale
};

struct AnchorLocation {
  int level_index = 0;  // index into AnchorGrid::levels
  int x = 0, y = 0;     // cell
  int shape = 0;        // index into the A per-cell shapes
};

/// Dense multi-level anchor lattice with a flat enumeration across levels.
/// Anchors are stored implicitly; boxes are derived on demand.
class AnchorGrid {
 public:
  struct Level {
    int level = 0;   // pyramid level l
    int width = 0;   // W_l
    int height = 0;  // H_l
    int stride = 0;  // 2^l
    int first_anchor = 0;  // flat index of this level's first anchor
  };

  AnchorGrid(int image_width, int image_height, const AnchorGridConfig& config);

  int anchors_per_cell() const { return anchors_per_cell_; }
  int total() const { return total_; }
  const std::vector<Level>& levels() const { return levels_; }
  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }
  const AnchorGridConfig& config() const { return config_; }

  AnchorLocation locate(int anchor_index) const;
  int flat_index(const AnchorLocation& loc) const;
  Box anchor_box(int anchor_index) const;
  Box anchor_box(const AnchorLocation& loc) const;

 private:
  AnchorGridConfig config_;
  int image_width_ = 0, image_height_ = 0;
  int anchors_per_cell_ = 0;
  int total_ = 0;
  std::vector<Level> levels_;
  std::vector<double> shape_w_, shape_h_;  // per-shape side lengths at unit stride
};

/// Intersection-over-union of two boxes, symmetric, in [0,1].
double iou(const Box& a, const Box& b);

/// Anchor-to-box assignment at a strict IoU threshold: an anchor goes to its
/// argmax box when the max IoU exceeds the threshold, ties to the lowest box
/// index; everything else stays unassigned.
struct AnchorAssignment {
  std::vector<int> box_of_anchor;             // -1 = unassigned, size = grid.total()
  std::vector<std::vector<int>> anchors_of_box;  // per ground-truth box
  std::vector<int> assigned;                  // all assigned anchor indices, ascending

  bool is_assigned(int anchor) const { return box_of_anchor[anchor] >= 0; }
};

AnchorAssignment assign_anchors(const AnchorGrid& grid, const std::vector<Box>& boxes,
                                double iou_threshold = 0.5);

/// Plain union-find with path compression.
class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

/// One equivalence class of assigned anchors for a fixed verb.
struct AnchorClass {
  std::vector<int> anchors;  // flat anchor indices, ascending
  std::vector<int> boxes;    // distinct ground-truth box indices, ascending
  bool interacting = false;  // contains a subject/target pair linked by this verb
};

/// Per-verb partition of the assigned anchors.
struct EquivalenceClasses {
  std::vector<std::vector<AnchorClass>> per_verb;  // size V
  int classes(int verb) const { return static_cast<int>(per_verb[verb].size()); }
};

struct EquivalenceOptions {
  /// When false, a subject with several targets under one verb is merged with
  /// its lowest-index target only (ablation switch; the default follows the
  /// equivalence-relation reading and takes the full transitive closure).
  bool cross_target_merge = true;
};

EquivalenceClasses build_equivalence_classes(const AnchorAssignment& assignment,
                                             const std::vector<InteractionTriplet>& triplets,
                                             const VerbVocabulary& vocabulary,
                                             const EquivalenceOptions& options = {});

}  // namespace calipso
