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

#include "calipso/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace calipso {

AnchorGrid::AnchorGrid(int image_width, int image_height, const AnchorGridConfig& config)
    : config_(config), image_width_(image_width), image_height_(image_height) {
  if (config.level_min > config.level_max)
    throw std::invalid_argument("anchor grid: level_min exceeds level_max");
  if (config.scales.empty() || config.ratios.empty())
    throw std::invalid_argument("anchor grid: scales and ratios must be non-empty");

  anchors_per_cell_ = static_cast<int>(config.scales.size() * config.ratios.size());
  for (double scale : config.scales) {
    for (double ratio : config.ratios) {
      // Area-preserving anisotropy: w*h = (base*scale)^2, h/w = ratio.
      const double side = config.base_scale * scale;
      shape_w_.push_back(side / std::sqrt(ratio));
      shape_h_.push_back(side * std::sqrt(ratio));
    }
  }

  int first = 0;
  for (int l = config.level_min; l <= config.level_max; ++l) {
    Level lev;
    lev.level = l;
    lev.stride = 1 << l;
    lev.width = level_extent(image_width, l);
    lev.height = level_extent(image_height, l);
    lev.first_anchor = first;
    if (lev.width <= 0 || lev.height <= 0)
      throw std::invalid_argument("anchor grid: level " + std::to_string(l) +
                                  " has zero spatial size for image " +
                                  std::to_string(image_width) + "x" + std::to_string(image_height));
    first += lev.width * lev.height * anchors_per_cell_;
    levels_.push_back(lev);
  }
  total_ = first;
}

AnchorLocation AnchorGrid::locate(int anchor_index) const {
  for (int li = static_cast<int>(levels_.size()) - 1; li >= 0; --li) {
    const Level& lev = levels_[li];
    if (anchor_index >= lev.first_anchor) {
      int rest = anchor_index - lev.first_anchor;
      AnchorLocation loc;
      loc.level_index = li;
      loc.shape = rest % anchors_per_cell_;
      rest /= anchors_per_cell_;
      loc.x = rest % lev.width;
      loc.y = rest / lev.width;
      return loc;
    }
  }
  throw std::out_of_range("anchor index out of range");
}

int AnchorGrid::flat_index(const AnchorLocation& loc) const {
  const Level& lev = levels_[loc.level_index];
  return lev.first_anchor + (loc.y * lev.width + loc.x) * anchors_per_cell_ + loc.shape;
}

Box AnchorGrid::anchor_box(const AnchorLocation& loc) const {
  const Level& lev = levels_[loc.level_index];
  const double cx = (loc.x + 0.5) * lev.stride;
  const double cy = (loc.y + 0.5) * lev.stride;
  const double w = shape_w_[loc.shape] * lev.stride;
  const double h = shape_h_[loc.shape] * lev.stride;
  Box b;
  b.x_min = cx - 0.5 * w;
  b.x_max = cx + 0.5 * w;
  b.y_min = cy - 0.5 * h;
  b.y_max = cy + 0.5 * h;
  return b;
}

Box AnchorGrid::anchor_box(int anchor_index) const { return anchor_box(locate(anchor_index)); }

double iou(const Box& a, const Box& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0 || iy <= 0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

AnchorAssignment assign_anchors(const AnchorGrid& grid, const std::vector<Box>& boxes,
                                double iou_threshold) {
  AnchorAssignment out;
  out.box_of_anchor.assign(grid.total(), -1);
  out.anchors_of_box.assign(boxes.size(), {});
  if (boxes.empty()) return out;

  for (int a = 0; a < grid.total(); ++a) {
    const Box ab = grid.anchor_box(a);
    double best = iou_threshold;  // strict: IoU must exceed the threshold
    int best_box = -1;
    for (int j = 0; j < static_cast<int>(boxes.size()); ++j) {
      const double v = iou(ab, boxes[j]);
      if (v > best) {
        best = v;
        best_box = j;
      }
    }
    if (best_box >= 0) {
      out.box_of_anchor[a] = best_box;
      out.anchors_of_box[best_box].push_back(a);
      out.assigned.push_back(a);
    }
  }
  return out;
}

EquivalenceClasses build_equivalence_classes(const AnchorAssignment& assignment,
                                             const std::vector<InteractionTriplet>& triplets,
                                             const VerbVocabulary& vocabulary,
                                             const EquivalenceOptions& options) {
  const int V = vocabulary.size();
  EquivalenceClasses out;
  out.per_verb.resize(V);

  const auto& assigned = assignment.assigned;
  const int n = static_cast<int>(assigned.size());
  std::map<int, int> local_of_anchor;  // flat anchor id -> [0, n)
  for (int i = 0; i < n; ++i) local_of_anchor[assigned[i]] = i;

  auto box_has_anchors = [&](int box) {
    return box >= 0 && box < static_cast<int>(assignment.anchors_of_box.size()) &&
           !assignment.anchors_of_box[box].empty();
  };

  for (int v = 0; v < V; ++v) {
    UnionFind uf(n);
    // Same assigned box.
    for (const auto& members : assignment.anchors_of_box)
      for (std::size_t k = 1; k < members.size(); ++k)
        uf.unite(local_of_anchor[members[0]], local_of_anchor[members[k]]);

    // Boxes linked by a v-triplet, in either direction. A triplet whose
    // subject or target has no assigned anchors contributes no merge.
    std::set<std::pair<int, int>> merged_pairs;
    std::set<int> subjects_merged;  // for the cross-target ablation switch
    for (const auto& t : triplets) {
      if (t.verb_id != v || !t.target_index) continue;
      if (!box_has_anchors(t.subject_index) || !box_has_anchors(*t.target_index)) continue;
      if (!options.cross_target_merge && subjects_merged.count(t.subject_index)) continue;
      subjects_merged.insert(t.subject_index);
      merged_pairs.insert({std::min(t.subject_index, *t.target_index),
                           std::max(t.subject_index, *t.target_index)});
      uf.unite(local_of_anchor[assignment.anchors_of_box[t.subject_index][0]],
               local_of_anchor[assignment.anchors_of_box[*t.target_index][0]]);
    }

    std::map<int, AnchorClass> by_root;
    for (int i = 0; i < n; ++i) by_root[uf.find(i)].anchors.push_back(assigned[i]);

    for (auto& [root, cls] : by_root) {
      std::set<int> boxes;
      for (int a : cls.anchors) boxes.insert(assignment.box_of_anchor[a]);
      cls.boxes.assign(boxes.begin(), boxes.end());
      // Interacting iff the class spans both ends of some v-triplet.
      for (const auto& [bn, bm] : merged_pairs)
        if (boxes.count(bn) && boxes.count(bm)) {
          cls.interacting = true;
          break;
        }
      out.per_verb[v].push_back(std::move(cls));
    }
  }
  return out;
}

}  // namespace calipso
