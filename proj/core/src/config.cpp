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

#include "calipso/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "calipso/hash.hpp"

namespace calipso {

using nlohmann::json;

namespace {

// Field-by-field reader that rejects unknown keys, so config typos fail
// loudly instead of silently running defaults.
class Fields {
 public:
  Fields(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j.is_object()) throw std::invalid_argument(context_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (j_.contains(key)) out = j_.at(key).get<T>();
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key))
        throw std::invalid_argument(context_ + ": unknown key '" + key + "'");
  }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

json to_json(const synth::GeometryRules& r) {
  return json{{"hold_gap_max", r.hold_gap_max},
              {"sit_dx_frac", r.sit_dx_frac},
              {"sit_drop_min", r.sit_drop_min},
              {"sit_drop_frac", r.sit_drop_frac},
              {"look_cone_deg", r.look_cone_deg},
              {"look_min_dist", r.look_min_dist},
              {"look_max_dist", r.look_max_dist},
              {"throw_cone_deg", r.throw_cone_deg},
              {"throw_min_dist", r.throw_min_dist},
              {"throw_max_dist", r.throw_max_dist}};
}

synth::GeometryRules geometry_from_json(const json& j) {
  synth::GeometryRules r;
  Fields f(j, "scene_gen.rules");
  f.get("hold_gap_max", r.hold_gap_max);
  f.get("sit_dx_frac", r.sit_dx_frac);
  f.get("sit_drop_min", r.sit_drop_min);
  f.get("sit_drop_frac", r.sit_drop_frac);
  f.get("look_cone_deg", r.look_cone_deg);
  f.get("look_min_dist", r.look_min_dist);
  f.get("look_max_dist", r.look_max_dist);
  f.get("throw_cone_deg", r.throw_cone_deg);
  f.get("throw_min_dist", r.throw_min_dist);
  f.get("throw_max_dist", r.throw_max_dist);
  f.finish();
  return r;
}

json to_json(const synth::SceneGenConfig& c) {
  return json{{"image_width", c.image_width},
              {"image_height", c.image_height},
              {"image_channels", c.image_channels},
              {"humans_min", c.humans_min},
              {"humans_max", c.humans_max},
              {"p_hold", c.p_hold},
              {"p_look", c.p_look},
              {"p_throw", c.p_throw},
              {"p_sit", c.p_sit},
              {"p_walk", c.p_walk},
              {"distractor_rate", c.distractor_rate},
              {"max_distractors", c.max_distractors},
              {"shared_target_rate", c.shared_target_rate},
              {"rules", to_json(c.rules)},
              {"min_separation", c.min_separation},
              {"max_scene_attempts", c.max_scene_attempts},
              {"max_place_attempts", c.max_place_attempts},
              {"seed", c.seed},
              {"vocabulary", to_json(c.vocabulary)}};
}

synth::SceneGenConfig scene_gen_from_json(const json& j) {
  synth::SceneGenConfig c;
  Fields f(j, "scene_gen");
  f.get("image_width", c.image_width);
  f.get("image_height", c.image_height);
  f.get("image_channels", c.image_channels);
  f.get("humans_min", c.humans_min);
  f.get("humans_max", c.humans_max);
  f.get("p_hold", c.p_hold);
  f.get("p_look", c.p_look);
  f.get("p_throw", c.p_throw);
  f.get("p_sit", c.p_sit);
  f.get("p_walk", c.p_walk);
  f.get("distractor_rate", c.distractor_rate);
  f.get("max_distractors", c.max_distractors);
  f.get("shared_target_rate", c.shared_target_rate);
  if (f.has("rules")) c.rules = geometry_from_json(f.raw("rules"));
  f.get("min_separation", c.min_separation);
  f.get("max_scene_attempts", c.max_scene_attempts);
  f.get("max_place_attempts", c.max_place_attempts);
  f.get("seed", c.seed);
  if (f.has("vocabulary")) c.vocabulary = vocabulary_from_json(f.raw("vocabulary"));
  f.finish();
  return c;
}

json to_json(const net::OptimizerConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"momentum", c.momentum},
              {"weight_decay", c.weight_decay},
              {"drop_factor", c.drop_factor},
              {"drop_at_fraction", c.drop_at_fraction}};
}

net::OptimizerConfig optimizer_from_json(const json& j) {
  net::OptimizerConfig c;
  Fields f(j, "train.optimizer");
  f.get("learning_rate", c.learning_rate);
  f.get("momentum", c.momentum);
  f.get("weight_decay", c.weight_decay);
  f.get("drop_factor", c.drop_factor);
  f.get("drop_at_fraction", c.drop_at_fraction);
  f.finish();
  return c;
}

json to_json(const LossConfig& c) {
  json usual = json::object();
  for (const auto& [verb, classes] : c.usual_targets)
    usual[std::to_string(verb)] = classes;
  return json{{"sigma", c.sigma},
              {"lambda_pull", c.lambda_pull},
              {"gamma_push", c.gamma_push},
              {"usual_targets", usual},
              {"symmetric_halving", c.symmetric_halving},
              {"include_background", c.include_background},
              {"bce_epsilon", c.bce_epsilon}};
}

LossConfig loss_from_json(const json& j) {
  LossConfig c;
  Fields f(j, "train.loss");
  f.get("sigma", c.sigma);
  f.get("lambda_pull", c.lambda_pull);
  f.get("gamma_push", c.gamma_push);
  if (f.has("usual_targets"))
    for (const auto& [key, value] : f.raw("usual_targets").items())
      c.usual_targets[std::stoi(key)] = value.get<std::set<int>>();
  f.get("symmetric_halving", c.symmetric_halving);
  f.get("include_background", c.include_background);
  f.get("bce_epsilon", c.bce_epsilon);
  f.finish();
  return c;
}

json to_json(const net::TrainConfig& c) {
  return json{{"steps", c.steps},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"horizontal_flip", c.horizontal_flip},
              {"optimizer", to_json(c.optimizer)},
              {"loss", to_json(c.loss)},
              {"cross_target_merge", c.equivalence.cross_target_merge}};
}

net::TrainConfig train_from_json(const json& j) {
  net::TrainConfig c;
  Fields f(j, "train");
  f.get("steps", c.steps);
  f.get("batch_size", c.batch_size);
  f.get("seed", c.seed);
  f.get("horizontal_flip", c.horizontal_flip);
  if (f.has("optimizer")) c.optimizer = optimizer_from_json(f.raw("optimizer"));
  if (f.has("loss")) c.loss = loss_from_json(f.raw("loss"));
  f.get("cross_target_merge", c.equivalence.cross_target_merge);
  f.finish();
  return c;
}

json to_json(const InferenceOptions& c) {
  return json{{"threshold", c.threshold},
              {"embedding_norm", c.norm == EmbeddingNorm::kL2 ? "l2" : "l1"},
              {"low_iou_flag", c.low_iou_flag},
              {"target_role", c.target_role},
              {"human_class_id", c.human_class_id}};
}

InferenceOptions inference_from_json(const json& j) {
  InferenceOptions c;
  Fields f(j, "inference");
  f.get("threshold", c.threshold);
  if (f.has("embedding_norm")) {
    const std::string norm = f.raw("embedding_norm").get<std::string>();
    if (norm == "l2")
      c.norm = EmbeddingNorm::kL2;
    else if (norm == "l1")
      c.norm = EmbeddingNorm::kL1;
    else
      throw std::invalid_argument("inference.embedding_norm: expected 'l1' or 'l2'");
  }
  f.get("low_iou_flag", c.low_iou_flag);
  f.get("target_role", c.target_role);
  f.get("human_class_id", c.human_class_id);
  f.finish();
  return c;
}

}  // namespace

json to_json(const net::NetworkConfig& c) {
  return json{{"level_min", c.level_min},
              {"level_max", c.level_max},
              {"channels", c.channels},
              {"blocks", c.blocks},
              {"anchors_per_cell", c.anchors_per_cell},
              {"verbs", c.verbs},
              {"embedding_dim", c.embedding_dim},
              {"image_channels", c.image_channels},
              {"share_weights_across_levels", c.share_weights_across_levels},
              {"passive_head_enabled", c.passive_head_enabled},
              {"target_head_enabled", c.target_head_enabled}};
}

net::NetworkConfig network_config_from_json(const json& j) {
  net::NetworkConfig c;
  Fields f(j, "network");
  f.get("level_min", c.level_min);
  f.get("level_max", c.level_max);
  f.get("channels", c.channels);
  f.get("blocks", c.blocks);
  f.get("anchors_per_cell", c.anchors_per_cell);
  f.get("verbs", c.verbs);
  f.get("embedding_dim", c.embedding_dim);
  f.get("image_channels", c.image_channels);
  f.get("share_weights_across_levels", c.share_weights_across_levels);
  f.get("passive_head_enabled", c.passive_head_enabled);
  f.get("target_head_enabled", c.target_head_enabled);
  f.finish();
  return c;
}

json to_json(const AnchorGridConfig& c) {
  return json{{"level_min", c.level_min},
              {"level_max", c.level_max},
              {"scales", c.scales},
              {"ratios", c.ratios},
              {"base_scale", c.base_scale}};
}

AnchorGridConfig anchor_config_from_json(const json& j) {
  AnchorGridConfig c;
  Fields f(j, "anchors");
  f.get("level_min", c.level_min);
  f.get("level_max", c.level_max);
  f.get("scales", c.scales);
  f.get("ratios", c.ratios);
  f.get("base_scale", c.base_scale);
  f.finish();
  return c;
}

json to_json(const VerbVocabulary& vocabulary) {
  json verbs = json::array();
  for (const auto& v : vocabulary.verbs())
    verbs.push_back({{"name", v.name}, {"targetless", v.targetless}});
  return verbs;
}

VerbVocabulary vocabulary_from_json(const json& j) {
  std::vector<Verb> verbs;
  for (const auto& v : j)
    verbs.push_back({v.at("name").get<std::string>(), v.at("targetless").get<bool>()});
  return VerbVocabulary(std::move(verbs));
}

json to_json(const RunConfig& config) {
  return json{{"scene_gen", to_json(config.scene_gen)},
              {"network", to_json(config.network)},
              {"anchors", to_json(config.anchors)},
              {"train", to_json(config.train)},
              {"inference", to_json(config.inference)}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Fields f(j, "config");
  if (f.has("scene_gen")) c.scene_gen = scene_gen_from_json(f.raw("scene_gen"));
  if (f.has("network")) c.network = network_config_from_json(f.raw("network"));
  if (f.has("anchors")) c.anchors = anchor_config_from_json(f.raw("anchors"));
  if (f.has("train")) c.train = train_from_json(f.raw("train"));
  if (f.has("inference")) c.inference = inference_from_json(f.raw("inference"));
  f.finish();
  c.validate();
  return c;
}

void RunConfig::validate() const {
  scene_gen.validate();
  network.validate();
  if (network.verbs != scene_gen.vocabulary.size())
    throw std::invalid_argument("config: network.verbs must equal the vocabulary size");
  const int a = static_cast<int>(anchors.scales.size() * anchors.ratios.size());
  if (a != network.anchors_per_cell)
    throw std::invalid_argument(
        "config: anchors.scales x anchors.ratios must equal network.anchors_per_cell");
  if (anchors.level_min != network.level_min || anchors.level_max != network.level_max)
    throw std::invalid_argument("config: anchor and network pyramid ranges must agree");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  return run_config_from_json(j);
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like section.key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("override has an empty path segment: " + path);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::parse_error&) {
        parsed = value;  // plain string
      }
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::uint64_t config_hash(const json& j) { return fnv1a64(j.dump()); }

}  // namespace calipso
