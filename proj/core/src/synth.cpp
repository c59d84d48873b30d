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

#include "calipso/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace calipso::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

double box_gap(const Box& a, const Box& b) {
  const double dx = std::max({a.x_min - b.x_max, b.x_min - a.x_max, 0.0});
  const double dy = std::max({a.y_min - b.y_max, b.y_min - a.y_max, 0.0});
  return std::max(dx, dy);
}

double center_dist(const Box& a, const Box& b) {
  const double dx = a.center_x() - b.center_x();
  const double dy = a.center_y() - b.center_y();
  return std::sqrt(dx * dx + dy * dy);
}

// Absolute angle between `direction` and the ray from a's center to b's.
double angle_to(const Box& a, double direction, const Box& b) {
  const double ray = std::atan2(b.center_y() - a.center_y(), b.center_x() - a.center_x());
  double diff = std::fmod(std::abs(ray - direction), 2 * kPi);
  if (diff > kPi) diff = 2 * kPi - diff;
  return diff;
}

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kHumanColor{232, 232, 228};
constexpr Rgb kNoseColor{255, 220, 60};
constexpr Rgb kRayColor{120, 110, 30};
constexpr Rgb kThrowColor{40, 230, 235};
constexpr Rgb kStreakColor{170, 170, 175};
constexpr Rgb kCupColor{62, 205, 92};
constexpr Rgb kChairColor{214, 128, 44};
constexpr Rgb kBallColor{74, 112, 230};
constexpr Rgb kScreenColor{202, 64, 206};

void put(Image& img, int x, int y, const Rgb& c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  img.at(x, y, 0) = c.r;
  img.at(x, y, 1) = c.g;
  img.at(x, y, 2) = c.b;
}

void fill_rect(Image& img, double x0, double y0, double x1, double y1, const Rgb& c) {
  for (int y = static_cast<int>(std::floor(y0)); y < static_cast<int>(std::ceil(y1)); ++y)
    for (int x = static_cast<int>(std::floor(x0)); x < static_cast<int>(std::ceil(x1)); ++x)
      put(img, x, y, c);
}

void rect_outline(Image& img, const Box& b, int thickness, const Rgb& c) {
  fill_rect(img, b.x_min, b.y_min, b.x_max, b.y_min + thickness, c);
  fill_rect(img, b.x_min, b.y_max - thickness, b.x_max, b.y_max, c);
  fill_rect(img, b.x_min, b.y_min, b.x_min + thickness, b.y_max, c);
  fill_rect(img, b.x_max - thickness, b.y_min, b.x_max, b.y_max, c);
}

void fill_disk(Image& img, double cx, double cy, double radius, const Rgb& c) {
  for (int y = static_cast<int>(cy - radius); y <= static_cast<int>(cy + radius); ++y)
    for (int x = static_cast<int>(cx - radius); x <= static_cast<int>(cx + radius); ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) put(img, x, y, c);
    }
}

void draw_line(Image& img, double x0, double y0, double x1, double y1, int thickness,
               const Rgb& c, double dash_on = 0, double dash_off = 0) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int steps = std::max(1, static_cast<int>(len * 2));
  const double period = dash_on + dash_off;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    if (period > 0 && std::fmod(t * len, period) >= dash_on) continue;
    const double x = x0 + (x1 - x0) * t, y = y0 + (y1 - y0) * t;
    for (int oy = -(thickness / 2); oy <= thickness / 2; ++oy)
      for (int ox = -(thickness / 2); ox <= thickness / 2; ++ox)
        put(img, static_cast<int>(x) + ox, static_cast<int>(y) + oy, c);
  }
}

Box make_box(double cx, double cy, double w, double h, int class_id) {
  Box b;
  b.x_min = cx - w / 2;
  b.x_max = cx + w / 2;
  b.y_min = cy - h / 2;
  b.y_max = cy + h / 2;
  b.class_id = class_id;
  return b;
}

struct SizeRange {
  double lo, hi;
};

SizeRange class_size(int class_id) {
  switch (class_id) {
    case kCup: return {22, 27};
    case kChair: return {26, 32};
    case kBall: return {22, 25};
    case kScreen: return {26, 32};
    default: return {36, 52};
  }
}

const std::vector<int>& usual_classes(int verb) {
  static const std::vector<int> hold = {kCup, kBall};
  static const std::vector<int> sit = {kChair};
  static const std::vector<int> look = {kScreen, kCup, kBall};
  static const std::vector<int> thr = {kBall};
  static const std::vector<int> none = {};
  switch (verb) {
    case kHold: return hold;
    case kSitOn: return sit;
    case kLookAt: return look;
    case kThrowTo: return thr;
    default: return none;
  }
}

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

VerbVocabulary default_vocabulary() {
  return VerbVocabulary({{"hold", false},
                         {"sit-on", false},
                         {"look-at", false},
                         {"throw-to", false},
                         {"stand", true},
                         {"walk", true}});
}

void SceneGenConfig::validate() const {
  if (image_channels != 3)
    throw std::invalid_argument("scene generator renders 3-channel rasters");
  if (humans_min < 1 || humans_max < humans_min)
    throw std::invalid_argument("scene generator: bad human count range");
  if (distractor_rate < 0 || distractor_rate >= 1)
    throw std::invalid_argument("scene generator: distractor rate must lie in [0,1)");
  if (p_sit + p_walk > 1.0)
    throw std::invalid_argument("scene generator: p_sit + p_walk must not exceed 1");
  bool has_targetless = false, has_targeted = false;
  for (const auto& v : vocabulary.verbs()) (v.targetless ? has_targetless : has_targeted) = true;
  if (!has_targetless || !has_targeted)
    throw std::invalid_argument(
        "scene generator: vocabulary needs at least one targeted and one targetless verb");
}

bool holds(const Box& human, const Box& target, const GeometryRules& rules) {
  // Carried at hand height: gap-adjacent and not below the subject.
  return box_gap(human, target) <= rules.hold_gap_max && target.center_y() <= human.y_max;
}

bool sits_on(const Box& human, const Box& target, const GeometryRules& rules) {
  const double drop = human.y_max - target.y_min;  // how deep the subject sits in the seat
  return std::abs(human.center_x() - target.center_x()) <= rules.sit_dx_frac * target.width() &&
         drop >= rules.sit_drop_min && drop <= rules.sit_drop_frac * target.height();
}

bool looks_at(const Box& human, double orient_radians, const Box& target,
              const GeometryRules& rules) {
  const double dist = center_dist(human, target);
  return dist >= rules.look_min_dist && dist <= rules.look_max_dist &&
         angle_to(human, orient_radians, target) <= deg2rad(rules.look_cone_deg);
}

bool throws_to(const Box& human, std::optional<double> throw_radians, const Box& target,
               const GeometryRules& rules) {
  if (!throw_radians) return false;
  const double dist = center_dist(human, target);
  return dist >= rules.throw_min_dist && dist <= rules.throw_max_dist &&
         angle_to(human, *throw_radians, target) <= deg2rad(rules.throw_cone_deg);
}

namespace {

// Everything a scene-building attempt accumulates before rendering.
struct Layout {
  std::vector<Box> boxes;
  std::vector<HumanState> humans;
  std::vector<InteractionTriplet> triplets;
};

// Drawn once per scene; placement retries keep the intent fixed so that verb
// frequencies follow the configured probabilities instead of placement luck.
struct HumanIntent {
  Locomotion locomotion = Locomotion::kStand;
  bool want_hold = false;
  bool want_look = false;
  bool want_throw = false;
  bool share_hold = false;
};

struct SceneIntent {
  std::vector<HumanIntent> humans;
  int distractors = 0;
};

class SceneBuilder {
 public:
  SceneBuilder(const SceneGenConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {}

  SceneIntent draw_intent();
  std::optional<GeneratedScene> attempt(const SceneIntent& intent);

 private:
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }
  int pick(const std::vector<int>& xs) {
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng_)];
  }
  double pick_direction() {
    return deg2rad(45.0 * std::uniform_int_distribution<int>(0, 7)(rng_));
  }

  // Which targeted verbs fire for (human h, candidate target box).
  std::set<int> fired_verbs(int h, const Box& target) const {
    std::set<int> out;
    const Box& hb = layout_.boxes[layout_.humans[h].box_index];
    const auto& rules = cfg_.rules;
    if (holds(hb, target, rules)) out.insert(kHold);
    if (sits_on(hb, target, rules)) out.insert(kSitOn);
    if (looks_at(hb, layout_.humans[h].orient_radians, target, rules)) out.insert(kLookAt);
    if (throws_to(hb, layout_.humans[h].throw_radians, target, rules)) out.insert(kThrowTo);
    return out;
  }

  // A placement is acceptable when it keeps clear of unrelated boxes and
  // fires exactly the intended predicates (for the intended human only).
  bool placement_ok(const Box& candidate, int intended_human, const std::set<int>& intended,
                    const std::vector<int>& touch_allowed) const {
    if (candidate.x_min < 2 || candidate.y_min < 2 || candidate.x_max > cfg_.image_width - 2 ||
        candidate.y_max > cfg_.image_height - 2)
      return false;
    for (int j = 0; j < static_cast<int>(layout_.boxes.size()); ++j) {
      const bool may_touch = std::find(touch_allowed.begin(), touch_allowed.end(), j) !=
                             touch_allowed.end();
      if (!may_touch && box_gap(candidate, layout_.boxes[j]) < cfg_.min_separation) return false;
    }
    for (int h = 0; h < static_cast<int>(layout_.humans.size()); ++h) {
      std::set<int> fired = fired_verbs(h, candidate);
      // Cone margin so the drawn gaze ray never grazes unrelated objects.
      const Box& hb = layout_.boxes[layout_.humans[h].box_index];
      const double dist = center_dist(hb, candidate);
      if (!fired.count(kLookAt) && dist <= cfg_.rules.look_max_dist + 10 &&
          angle_to(hb, layout_.humans[h].orient_radians, candidate) <=
              deg2rad(cfg_.rules.look_cone_deg + 8))
        return false;
      if (h == intended_human) {
        if (fired != intended) return false;
      } else if (!fired.empty()) {
        return false;
      }
    }
    return true;
  }

  bool place_human(int* human_index, const HumanIntent& intent);
  bool place_target(int human_index, int verb, int* box_index);
  bool place_distractor();
  void render(Scene& scene) const;

  const SceneGenConfig& cfg_;
  std::mt19937_64& rng_;
  Layout layout_;
};

bool SceneBuilder::place_human(int* human_index, const HumanIntent& intent) {
  const SizeRange sz = class_size(kHuman);
  const bool needs_seat_below = intent.locomotion == Locomotion::kSit;
  for (int tries = 0; tries < cfg_.max_place_attempts; ++tries) {
    const double side = uniform(sz.lo, sz.hi);
    const double orient = pick_direction();
    // Keep vertical headroom when a seat must fit underneath.
    const double y_hi = needs_seat_below
                            ? cfg_.image_height - side / 2 - class_size(kChair).hi - 4
                            : cfg_.image_height - side / 2 - 2;
    if (y_hi <= side / 2 + 2) continue;
    const Box body = make_box(uniform(side / 2 + 2, cfg_.image_width - side / 2 - 2),
                              uniform(side / 2 + 2, y_hi), side, side, kHuman);
    if (needs_seat_below) {
      // A downward gaze would force the seat into the look cone.
      const double down = deg2rad(90.0);
      double diff = std::fmod(std::abs(orient - down), 2 * kPi);
      if (diff > kPi) diff = 2 * kPi - diff;
      if (diff < deg2rad(cfg_.rules.look_cone_deg + 12)) continue;
    }
    if (intent.want_look) {
      // A look target must fit along the orientation inside the canvas.
      const double reach = cfg_.rules.look_max_dist - 4;
      const double tx = body.center_x() + reach * std::cos(orient);
      const double ty = body.center_y() + reach * std::sin(orient);
      if (tx < 18 || ty < 18 || tx > cfg_.image_width - 18 || ty > cfg_.image_height - 18)
        continue;
    }
    if (!placement_ok(body, -1, {}, {})) continue;
    // The new subject must not interact with anything already placed, nor
    // have its gaze ray graze an existing object.
    bool clean = true;
    for (const auto& b : layout_.boxes) {
      if (b.class_id == kHuman) continue;
      if (holds(body, b, cfg_.rules) || sits_on(body, b, cfg_.rules) ||
          looks_at(body, orient, b, cfg_.rules))
        clean = false;
      if (center_dist(body, b) <= cfg_.rules.look_max_dist + 10 &&
          angle_to(body, orient, b) <= deg2rad(cfg_.rules.look_cone_deg + 8))
        clean = false;
    }
    if (!clean) continue;
    layout_.boxes.push_back(body);
    HumanState state;
    state.box_index = static_cast<int>(layout_.boxes.size()) - 1;
    state.orient_radians = orient;
    layout_.humans.push_back(state);
    *human_index = static_cast<int>(layout_.humans.size()) - 1;
    return true;
  }
  return false;
}

bool SceneBuilder::place_target(int human_index, int verb, int* box_index) {
  HumanState& hs = layout_.humans[human_index];
  const Box& hb = layout_.boxes[hs.box_index];
  const auto& rules = cfg_.rules;

  for (int tries = 0; tries < cfg_.max_place_attempts; ++tries) {
    const int cls = pick(usual_classes(verb));
    const SizeRange sz = class_size(cls);
    const double w = uniform(sz.lo, sz.hi);
    const double h = (cls == kScreen) ? w * 0.75 : w;
    Box cand;
    std::set<int> intended = {verb};

    if (verb == kHold) {
      const double side = coin(0.5) ? 1.0 : -1.0;
      const double cx = side > 0 ? hb.x_max + w / 2 + uniform(0, rules.hold_gap_max)
                                 : hb.x_min - w / 2 - uniform(0, rules.hold_gap_max);
      const double cy = uniform(hb.center_y() - hb.height() * 0.2, hb.y_max - h / 2);
      cand = make_box(cx, cy, w, h, cls);
    } else if (verb == kSitOn) {
      const double cx = hb.center_x() + uniform(-0.2, 0.2) * w;
      const double drop = uniform(0.05, rules.sit_drop_frac - 0.05) * h;
      cand = make_box(cx, hb.y_max - drop + h / 2, w, h, cls);
    } else if (verb == kLookAt) {
      const double dist = uniform(rules.look_min_dist + 4, rules.look_max_dist - 4);
      const double ang = hs.orient_radians + deg2rad(uniform(-0.5, 0.5) * rules.look_cone_deg);
      cand = make_box(hb.center_x() + dist * std::cos(ang),
                      hb.center_y() + dist * std::sin(ang), w, h, cls);
    } else {  // kThrowTo
      const double dir = pick_direction();
      const double dist = uniform(rules.throw_min_dist + 4, rules.throw_max_dist - 4);
      const double ang = dir + deg2rad(uniform(-0.5, 0.5) * rules.throw_cone_deg);
      hs.throw_radians = dir;
      cand = make_box(hb.center_x() + dist * std::cos(ang),
                      hb.center_y() + dist * std::sin(ang), w, h, cls);
      // The mark belongs to the attempt: undo on failure.
      if (!placement_ok(cand, human_index, intended, {hs.box_index})) {
        hs.throw_radians.reset();
        continue;
      }
      layout_.boxes.push_back(cand);
      *box_index = static_cast<int>(layout_.boxes.size()) - 1;
      return true;
    }

    const std::vector<int> touch = {hs.box_index};
    if (!placement_ok(cand, human_index, intended, touch)) continue;
    layout_.boxes.push_back(cand);
    *box_index = static_cast<int>(layout_.boxes.size()) - 1;
    return true;
  }
  return false;
}

bool SceneBuilder::place_distractor() {
  static const std::vector<int> pool = {kCup, kChair, kBall, kScreen};
  for (int tries = 0; tries < cfg_.max_place_attempts; ++tries) {
    const int cls = pick(pool);
    const SizeRange sz = class_size(cls);
    const double w = uniform(sz.lo, sz.hi);
    const double h = (cls == kScreen) ? w * 0.75 : w;
    const Box cand = make_box(uniform(w / 2 + 2, cfg_.image_width - w / 2 - 2),
                              uniform(h / 2 + 2, cfg_.image_height - h / 2 - 2), w, h, cls);
    if (!placement_ok(cand, -1, {}, {})) continue;
    layout_.boxes.push_back(cand);
    return true;
  }
  return false;  // dropped silently; the canvas is full
}

void SceneBuilder::render(Scene& scene) const {
  Image& img = scene.image;
  img.width = cfg_.image_width;
  img.height = cfg_.image_height;
  img.channels = 3;
  img.data.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      img.at(x, y, 0) = 18;
      img.at(x, y, 1) = 18;
      img.at(x, y, 2) = 22;
    }

  // Marks first, glyphs on top.
  for (const auto& hs : layout_.humans) {
    const Box& hb = layout_.boxes[hs.box_index];
    const double cx = hb.center_x(), cy = hb.center_y();
    draw_line(img, cx, cy, cx + cfg_.rules.look_max_dist * std::cos(hs.orient_radians),
              cy + cfg_.rules.look_max_dist * std::sin(hs.orient_radians), 1, kRayColor);
    if (hs.throw_radians) {
      // Dash out to the farthest object on the marked direction.
      double reach = cfg_.rules.throw_max_dist;
      for (const auto& b : layout_.boxes)
        if (b.class_id != kHuman &&
            throws_to(hb, hs.throw_radians, b, cfg_.rules))
          reach = center_dist(hb, b);
      draw_line(img, cx, cy, cx + reach * std::cos(*hs.throw_radians),
                cy + reach * std::sin(*hs.throw_radians), 2, kThrowColor, 6, 5);
    }
  }

  for (const auto& b : layout_.boxes) {
    switch (b.class_id) {
      case kCup:
        fill_disk(img, b.center_x(), b.center_y(), b.width() / 2, kCupColor);
        fill_rect(img, b.center_x() - 2, b.y_min, b.center_x() + 2, b.y_min + 4, kCupColor);
        break;
      case kChair:
        fill_rect(img, b.x_min, b.y_min + b.height() * 0.45, b.x_max, b.y_max, kChairColor);
        fill_rect(img, b.x_min, b.y_min, b.x_min + b.width() * 0.22, b.y_max, kChairColor);
        break;
      case kBall:
        fill_disk(img, b.center_x(), b.center_y(), b.width() / 2, kBallColor);
        break;
      case kScreen:
        rect_outline(img, b, 3, kScreenColor);
        break;
      default:
        break;
    }
  }

  for (const auto& hs : layout_.humans) {
    const Box& hb = layout_.boxes[hs.box_index];
    fill_rect(img, hb.x_min, hb.y_min, hb.x_max, hb.y_max, kHumanColor);
    const double cx = hb.center_x(), cy = hb.center_y();
    const double nose = hb.width() / 2 + 5;
    draw_line(img, cx, cy, cx + nose * std::cos(hs.orient_radians),
              cy + nose * std::sin(hs.orient_radians), 3, kNoseColor);
    if (hs.locomotion == Locomotion::kWalk) {
      const double side = std::cos(hs.orient_radians) >= 0 ? -1.0 : 1.0;
      const double sx = side > 0 ? hb.x_max + 3 : hb.x_min - 11;
      for (int k = 0; k < 3; ++k)
        draw_line(img, sx, cy - 6 + 6 * k, sx + 8, cy - 6 + 6 * k, 2, kStreakColor);
    }
  }
}

SceneIntent SceneBuilder::draw_intent() {
  SceneIntent intent;
  const int n_humans =
      std::uniform_int_distribution<int>(cfg_.humans_min, cfg_.humans_max)(rng_);
  for (int i = 0; i < n_humans; ++i) {
    HumanIntent hi;
    const double loco = uniform(0, 1);
    if (loco < cfg_.p_sit)
      hi.locomotion = Locomotion::kSit;
    else if (loco < cfg_.p_sit + cfg_.p_walk)
      hi.locomotion = Locomotion::kWalk;
    hi.want_hold = coin(cfg_.p_hold);
    hi.want_look = coin(cfg_.p_look);
    hi.want_throw = coin(cfg_.p_throw);
    hi.share_hold = i > 0 && hi.want_hold && coin(cfg_.shared_target_rate);
    intent.humans.push_back(hi);
  }
  for (int d = 0; d < cfg_.max_distractors; ++d)
    if (coin(cfg_.distractor_rate)) ++intent.distractors;
  return intent;
}

std::optional<GeneratedScene> SceneBuilder::attempt(const SceneIntent& intent) {
  layout_ = Layout{};

  for (const HumanIntent& hi : intent.humans) {
    int h = -1;
    if (!place_human(&h, hi)) return std::nullopt;
    HumanState& hs = layout_.humans[h];
    hs.locomotion = hi.locomotion;

    if (hi.locomotion == Locomotion::kSit) {
      int seat = -1;
      if (!place_target(h, kSitOn, &seat)) return std::nullopt;
    }
    if (hi.want_hold) {
      // Optionally share an object that another human already holds.
      int shared = -1;
      if (hi.share_hold) {
        for (int j = 0; j < static_cast<int>(layout_.boxes.size()); ++j) {
          const Box& b = layout_.boxes[j];
          if (b.class_id == kHuman) continue;
          for (int other = 0; other < h; ++other)
            if (fired_verbs(other, b).count(kHold)) shared = j;
        }
      }
      bool placed = false;
      if (shared >= 0) {
        // Move this human next to the shared object instead of adding a box.
        const Box& ob = layout_.boxes[shared];
        Box& hb = layout_.boxes[hs.box_index];
        const double w = hb.width(), ht = hb.height();
        for (int tries = 0; tries < cfg_.max_place_attempts && !placed; ++tries) {
          const double side = coin(0.5) ? 1.0 : -1.0;
          const double cx = side > 0 ? ob.x_max + w / 2 + uniform(0, cfg_.rules.hold_gap_max)
                                     : ob.x_min - w / 2 - uniform(0, cfg_.rules.hold_gap_max);
          const double cy = ob.center_y() + uniform(0, 0.3) * ht;
          const Box moved = make_box(cx, cy, w, ht, kHuman);
          const Box saved = hb;
          layout_.boxes[hs.box_index] = moved;
          bool ok = moved.x_min >= 2 && moved.y_min >= 2 &&
                    moved.x_max <= cfg_.image_width - 2 && moved.y_max <= cfg_.image_height - 2;
          for (int j = 0; ok && j < static_cast<int>(layout_.boxes.size()); ++j) {
            if (j == hs.box_index || j == shared) continue;
            if (box_gap(moved, layout_.boxes[j]) < cfg_.min_separation) ok = false;
          }
          // The moved body must hold exactly the shared object, trip nothing
          // else, and keep its gaze ray clear of every existing object.
          for (int j = 0; ok && j < static_cast<int>(layout_.boxes.size()); ++j) {
            const Box& b = layout_.boxes[j];
            if (b.class_id == kHuman || j == hs.box_index) continue;
            const auto fired = fired_verbs(h, b);
            if (j == shared ? fired != std::set<int>{kHold} : !fired.empty()) ok = false;
            if (center_dist(moved, b) <= cfg_.rules.look_max_dist + 10 &&
                angle_to(moved, hs.orient_radians, b) <=
                    deg2rad(cfg_.rules.look_cone_deg + 8))
              ok = false;
          }
          if (hi.want_look && ok) {
            const double reach = cfg_.rules.look_max_dist - 4;
            const double tx = moved.center_x() + reach * std::cos(hs.orient_radians);
            const double ty = moved.center_y() + reach * std::sin(hs.orient_radians);
            if (tx < 18 || ty < 18 || tx > cfg_.image_width - 18 ||
                ty > cfg_.image_height - 18)
              ok = false;
          }
          if (ok)
            placed = true;
          else
            layout_.boxes[hs.box_index] = saved;
        }
      }
      if (!placed) {
        int obj = -1;
        if (!place_target(h, kHold, &obj)) return std::nullopt;
      }
    }
    if (hi.want_look) {
      int obj = -1;
      if (!place_target(h, kLookAt, &obj)) return std::nullopt;
    }
    if (hi.want_throw) {
      int obj = -1;
      if (!place_target(h, kThrowTo, &obj)) return std::nullopt;
    }
  }

  for (int d = 0; d < intent.distractors; ++d) place_distractor();

  // Exhaustive label pass: the predicates are the ground truth.
  layout_.triplets.clear();
  for (int h = 0; h < static_cast<int>(layout_.humans.size()); ++h) {
    const HumanState& hs = layout_.humans[h];
    for (int j = 0; j < static_cast<int>(layout_.boxes.size()); ++j) {
      if (layout_.boxes[j].class_id == kHuman) continue;
      for (int verb : fired_verbs(h, layout_.boxes[j]))
        layout_.triplets.push_back({hs.box_index, verb, j});
    }
    if (hs.locomotion != Locomotion::kSit)
      layout_.triplets.push_back(
          {hs.box_index, hs.locomotion == Locomotion::kWalk ? kWalk : kStand, std::nullopt});
    if (hs.locomotion == Locomotion::kSit) {
      bool seated = false;
      for (const auto& t : layout_.triplets)
        if (t.subject_index == hs.box_index && t.verb_id == kSitOn) seated = true;
      if (!seated) return std::nullopt;
    }
  }

  // One target per (human, verb): required by the per-pair selection rule.
  std::set<std::pair<int, int>> seen;
  for (const auto& t : layout_.triplets)
    if (t.target_index && !seen.insert({t.subject_index, t.verb_id}).second)
      return std::nullopt;

  GeneratedScene out;
  out.scene.human_class_id = kHuman;
  out.scene.boxes = layout_.boxes;
  out.scene.triplets = layout_.triplets;
  out.trace.humans = layout_.humans;
  out.trace.rules = cfg_.rules;
  render(out.scene);
  return out;
}

}  // namespace

GeneratedScene generate_scene_with_trace(const SceneGenConfig& config, std::mt19937_64& rng) {
  config.validate();
  SceneBuilder builder(config, rng);
  const SceneIntent intent = builder.draw_intent();
  for (int attempt = 0; attempt < config.max_scene_attempts; ++attempt) {
    auto result = builder.attempt(intent);
    if (result) return std::move(*result);
  }
  throw std::runtime_error("generate_scene: unplaceable configuration after " +
                           std::to_string(config.max_scene_attempts) + " attempts");
}

Scene generate_scene(const SceneGenConfig& config, std::mt19937_64& rng) {
  return generate_scene_with_trace(config, rng).scene;
}

std::vector<Scene> generate_dataset(const SceneGenConfig& config, int count) {
  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (int i = 0; i < count; ++i) {
    // splitmix-style stream derivation keeps scenes independent of order.
    // A scene whose drawn intent cannot be placed (rare, overcrowded draws)
    // retries under a salted stream; determinism is preserved.
    Scene scene;
    for (std::uint64_t salt = 0;; ++salt) {
      std::uint64_t z = (config.seed ^ (salt * 0xda942042e4dd58b5ull)) +
                        0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(i) + 1);
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      std::mt19937_64 rng(z ^ (z >> 31));
      try {
        scene = generate_scene(config, rng);
        break;
      } catch (const std::runtime_error&) {
        if (salt >= 20) throw;
      }
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace calipso::synth
