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

#include "calipso/net/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "calipso/base64.hpp"
#include "calipso/config.hpp"
#include "calipso/hash.hpp"

namespace calipso::net {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string encode_floats(const std::vector<float>& values) {
  std::vector<std::uint8_t> bytes(values.size() * sizeof(float));
  std::memcpy(bytes.data(), values.data(), bytes.size());
  return base64_encode(bytes);
}

std::vector<float> decode_floats(const std::string& text, std::size_t expected) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != expected * sizeof(float))
    throw std::runtime_error("checkpoint: parameter payload has wrong size");
  std::vector<float> values(expected);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

json config_json(const NetworkConfig& network, const AnchorGridConfig& anchors,
                 const VerbVocabulary& vocabulary) {
  return json{{"network", to_json(network)},
              {"anchors", to_json(anchors)},
              {"vocabulary", to_json(vocabulary)}};
}

}  // namespace

void save_checkpoint(const std::string& path, InteractionModel& model,
                     const AnchorGridConfig& anchor_config, const VerbVocabulary& vocabulary) {
  const json cfg = config_json(model.config(), anchor_config, vocabulary);

  json params = json::array();
  Fnv1a64 payload_hash;
  for (const auto* p : model.params()) {
    params.push_back(
        {{"name", p->name}, {"size", p->w.size()}, {"data", encode_floats(p->w)}});
    payload_hash.update(p->w.data(), p->w.size() * sizeof(float));
  }

  json j;
  j["format_version"] = kFormatVersion;
  j["config"] = cfg;
  j["config_hash"] = to_hex(config_hash(cfg));
  j["params"] = std::move(params);
  j["params_hash"] = to_hex(payload_hash.value());

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump() << '\n';
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  json j;
  in >> j;

  if (j.at("format_version").get<int>() != kFormatVersion)
    throw std::runtime_error("checkpoint: unsupported format version");
  const json& cfg = j.at("config");
  if (j.at("config_hash").get<std::string>() != to_hex(config_hash(cfg)))
    throw std::runtime_error("checkpoint: config hash mismatch, refusing to load");

  LoadedCheckpoint out;
  out.network = network_config_from_json(cfg.at("network"));
  out.anchors = anchor_config_from_json(cfg.at("anchors"));
  out.vocabulary = vocabulary_from_json(cfg.at("vocabulary"));
  out.model = std::make_unique<InteractionModel>(out.network, /*seed=*/0);

  std::map<std::string, const json*> stored;
  for (const auto& rec : j.at("params")) stored[rec.at("name").get<std::string>()] = &rec;

  Fnv1a64 payload_hash;
  for (auto* p : out.model->params()) {
    auto it = stored.find(p->name);
    if (it == stored.end())
      throw std::runtime_error("checkpoint: missing parameter " + p->name);
    if (it->second->at("size").get<std::size_t>() != p->w.size())
      throw std::runtime_error("checkpoint: size mismatch for parameter " + p->name);
    p->w = decode_floats(it->second->at("data").get<std::string>(), p->w.size());
    payload_hash.update(p->w.data(), p->w.size() * sizeof(float));
    stored.erase(it);
  }
  if (!stored.empty())
    throw std::runtime_error("checkpoint: unexpected parameter " + stored.begin()->first);
  if (j.at("params_hash").get<std::string>() != to_hex(payload_hash.value()))
    throw std::runtime_error("checkpoint: parameter hash mismatch");
  return out;
}

}  // namespace calipso::net
