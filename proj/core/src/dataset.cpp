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

#include "calipso/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "calipso/base64.hpp"
#include "calipso/hash.hpp"

namespace calipso {

using nlohmann::json;

namespace {

json box_to_json(const Box& b) {
  return json::array({b.x_min, b.y_min, b.x_max, b.y_max, b.class_id});
}

Box box_from_json(const json& j) {
  Box b;
  b.x_min = j.at(0).get<double>();
  b.y_min = j.at(1).get<double>();
  b.x_max = j.at(2).get<double>();
  b.y_max = j.at(3).get<double>();
  b.class_id = j.at(4).get<int>();
  return b;
}

std::runtime_error line_error(const std::string& path, std::size_t line_no,
                              const std::string& what) {
  return std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string scene_to_json_line(const Scene& scene, std::uint64_t vocab_hash) {
  json j;
  j["human_class_id"] = scene.human_class_id;
  j["vocab"] = to_hex(vocab_hash);
  j["image"] = {{"w", scene.image.width},
                {"h", scene.image.height},
                {"c", scene.image.channels},
                {"data", base64_encode(scene.image.data)}};
  json boxes = json::array();
  for (const auto& b : scene.boxes) boxes.push_back(box_to_json(b));
  j["boxes"] = std::move(boxes);
  json triplets = json::array();
  for (const auto& t : scene.triplets) {
    json rec = json::array({t.subject_index, t.verb_id});
    if (t.target_index) rec.push_back(*t.target_index);
    triplets.push_back(std::move(rec));
  }
  j["triplets"] = std::move(triplets);
  return j.dump();
}

Scene scene_from_json_line(const std::string& line, std::uint64_t expected_vocab_hash) {
  const json j = json::parse(line);
  if (j.at("vocab").get<std::string>() != to_hex(expected_vocab_hash))
    throw std::runtime_error("vocabulary hash mismatch");
  Scene scene;
  scene.human_class_id = j.at("human_class_id").get<int>();
  const json& im = j.at("image");
  scene.image.width = im.at("w").get<int>();
  scene.image.height = im.at("h").get<int>();
  scene.image.channels = im.at("c").get<int>();
  scene.image.data = base64_decode(im.at("data").get<std::string>());
  const std::size_t expected =
      static_cast<std::size_t>(scene.image.width) * scene.image.height * scene.image.channels;
  if (scene.image.data.size() != expected)
    throw std::runtime_error("image payload size does not match dimensions");
  for (const auto& b : j.at("boxes")) scene.boxes.push_back(box_from_json(b));
  for (const auto& t : j.at("triplets")) {
    InteractionTriplet trip;
    trip.subject_index = t.at(0).get<int>();
    trip.verb_id = t.at(1).get<int>();
    if (t.size() > 2) trip.target_index = t.at(2).get<int>();
    scene.triplets.push_back(trip);
  }
  return scene;
}

void write_dataset(const std::string& path, const std::vector<Scene>& scenes,
                   const VerbVocabulary& vocabulary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::uint64_t h = vocabulary.hash();
  for (const auto& s : scenes) out << scene_to_json_line(s, h) << '\n';
}

std::vector<Scene> read_dataset(const std::string& path, const VerbVocabulary& vocabulary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<Scene> scenes;
  std::string line;
  std::size_t line_no = 0;
  const std::uint64_t h = vocabulary.hash();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      scenes.push_back(scene_from_json_line(line, h));
    } catch (const std::exception& e) {
      throw line_error(path, line_no, e.what());
    }
  }
  return scenes;
}

void write_vocabulary(const std::string& path, const VerbVocabulary& vocabulary) {
  json verbs = json::array();
  for (const auto& v : vocabulary.verbs())
    verbs.push_back({{"name", v.name}, {"targetless", v.targetless}});
  json j;
  j["verbs"] = std::move(verbs);
  j["hash"] = to_hex(vocabulary.hash());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

VerbVocabulary read_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  std::vector<Verb> verbs;
  for (const auto& v : j.at("verbs"))
    verbs.push_back({v.at("name").get<std::string>(), v.at("targetless").get<bool>()});
  VerbVocabulary vocab(std::move(verbs));
  if (j.contains("hash") && j.at("hash").get<std::string>() != to_hex(vocab.hash()))
    throw std::runtime_error(path + ": vocabulary hash mismatch");
  return vocab;
}

void write_predictions(const std::string& path, const std::vector<ScenePredictions>& predictions,
                       const VerbVocabulary& vocabulary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& sp : predictions) {
    json j;
    j["scene"] = sp.scene_index;
    json preds = json::array();
    for (const auto& p : sp.predictions) {
      json rec;
      rec["subject"] = box_to_json(p.subject);
      rec["verb"] = p.verb_id;
      rec["verb_name"] = vocabulary.verb(p.verb_id).name;
      rec["score"] = p.score;
      rec["kind"] = p.kind == PredictionKind::kPair ? "pair" : "triplet";
      if (p.target) rec["target"] = box_to_json(*p.target);
      preds.push_back(std::move(rec));
    }
    j["predictions"] = std::move(preds);
    out << j.dump() << '\n';
  }
}

std::vector<ScenePredictions> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<ScenePredictions> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ScenePredictions sp;
      sp.scene_index = j.at("scene").get<int>();
      for (const auto& rec : j.at("predictions")) {
        ScoredTriplet p;
        p.subject = box_from_json(rec.at("subject"));
        p.verb_id = rec.at("verb").get<int>();
        p.score = rec.at("score").get<double>();
        p.kind = rec.at("kind").get<std::string>() == "pair" ? PredictionKind::kPair
                                                             : PredictionKind::kTriplet;
        if (rec.contains("target")) p.target = box_from_json(rec.at("target"));
        sp.predictions.push_back(std::move(p));
      }
      out.push_back(std::move(sp));
    } catch (const std::exception& e) {
      throw line_error(path, line_no, e.what());
    }
  }
  return out;
}

}  // namespace calipso
