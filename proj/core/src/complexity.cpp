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

#include "calipso/complexity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "calipso/svg.hpp"

namespace calipso {

using nlohmann::json;

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Scene make_benchmark_scene(int objects, int image_size) {
  Scene scene;
  scene.human_class_id = 0;
  scene.image.width = scene.image.height = image_size;
  scene.image.channels = 3;
  scene.image.data.assign(static_cast<std::size_t>(image_size) * image_size * 3, 20);

  auto draw_square = [&](const Box& b, std::uint8_t r, std::uint8_t g, std::uint8_t bl) {
    for (int y = std::max(0, static_cast<int>(b.y_min));
         y < std::min(image_size, static_cast<int>(b.y_max)); ++y)
      for (int x = std::max(0, static_cast<int>(b.x_min));
           x < std::min(image_size, static_cast<int>(b.x_max)); ++x) {
        scene.image.at(x, y, 0) = r;
        scene.image.at(x, y, 1) = g;
        scene.image.at(x, y, 2) = bl;
      }
  };

  Box human{4, 4, 40, 40, 0};
  scene.boxes.push_back(human);
  draw_square(human, 232, 232, 228);

  // Objects tile the remaining canvas; overlap is irrelevant here.
  const int cols = std::max(1, (image_size - 48) / 14);
  for (int i = 0; i < objects; ++i) {
    const int cx = 48 + (i % cols) * 14;
    const int cy = 8 + (i / cols) * 14;
    Box b{static_cast<double>(cx), static_cast<double>(cy), static_cast<double>(cx + 12),
          static_cast<double>(cy + 12), 1 + (i % 4)};
    if (b.x_max > image_size - 2 || b.y_max > image_size - 2) {
      // Wrap around with a small offset rather than fail: counts drive cost.
      b = {2.0 + (i % 8) * 3, 44.0 + (i % 16) * 4, 16.0 + (i % 8) * 3, 58.0 + (i % 16) * 4,
           1 + (i % 4)};
    }
    scene.boxes.push_back(b);
    draw_square(b, 62, 205, 92);
  }
  return scene;
}

std::vector<BenchmarkRecord> benchmark_complexity(net::InteractionModel& model,
                                                  PairwiseBaseline& baseline,
                                                  const VerbVocabulary& vocabulary,
                                                  const AnchorGridConfig& grid_config,
                                                  const ComplexityConfig& config) {
  std::vector<BenchmarkRecord> records;
  InferenceOptions options;
  options.threshold = config.threshold;

  for (int pairs = 1; pairs <= config.max_pairs; pairs += config.pair_step) {
    const Scene scene = make_benchmark_scene(pairs, config.image_size);
    std::vector<Detection> detections;
    for (const auto& b : scene.boxes) detections.push_back({b, b.class_id, 1.0});

    BenchmarkRecord rec;
    rec.scene_id = static_cast<int>(records.size());
    rec.pairs = pairs;

    {
      net::OpCounter ops;
      InferenceStats stats;
      std::vector<double> times;
      for (int r = 0; r < config.warmups; ++r)
        detect_interactions(model, scene.image, detections, vocabulary, grid_config, options);
      for (int r = 0; r < config.repeats; ++r) {
        const double t0 = now_ms();
        detect_interactions(model, scene.image, detections, vocabulary, grid_config, options,
                            r == 0 ? &stats : nullptr);
        times.push_back(now_ms() - t0);
      }
      rec.single_shot_ms = median(times);
      rec.single_shot_ops = stats.forward_ops;
    }

    {
      std::vector<double> times;
      net::OpCounter ops;
      for (int r = 0; r < config.warmups; ++r)
        baseline.detect(scene.image, detections, vocabulary, config.threshold);
      for (int r = 0; r < config.repeats; ++r) {
        const double t0 = now_ms();
        baseline.detect(scene.image, detections, vocabulary, config.threshold,
                        r == 0 ? &ops : nullptr);
        times.push_back(now_ms() - t0);
      }
      rec.baseline_ms = median(times);
      rec.baseline_ops = ops.macs;
    }
    records.push_back(rec);
  }
  return records;
}

void write_benchmark_records(const std::string& path,
                             const std::vector<BenchmarkRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& r : records) {
    json j;
    j["scene_id"] = r.scene_id;
    j["pairs"] = r.pairs;
    j["single_shot_ms"] = r.single_shot_ms;
    j["baseline_ms"] = r.baseline_ms;
    j["single_shot_ops"] = r.single_shot_ops;
    j["baseline_ops"] = r.baseline_ops;
    out << j.dump() << '\n';
  }
}

std::vector<BenchmarkRecord> read_benchmark_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<BenchmarkRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    BenchmarkRecord r;
    r.scene_id = j.at("scene_id").get<int>();
    r.pairs = j.at("pairs").get<int>();
    r.single_shot_ms = j.at("single_shot_ms").get<double>();
    r.baseline_ms = j.at("baseline_ms").get<double>();
    r.single_shot_ops = j.at("single_shot_ops").get<std::uint64_t>();
    r.baseline_ops = j.at("baseline_ops").get<std::uint64_t>();
    records.push_back(r);
  }
  return records;
}

void write_benchmark_plot(const std::string& path,
                          const std::vector<BenchmarkRecord>& records) {
  PlotSeries single, pairwise;
  single.label = "single-shot";
  single.color = "#1f77b4";
  pairwise.label = "pairwise baseline";
  pairwise.color = "#d62728";
  for (const auto& r : records) {
    single.points.push_back({static_cast<double>(r.pairs), r.single_shot_ms});
    pairwise.points.push_back({static_cast<double>(r.pairs), r.baseline_ms});
  }
  write_line_plot(path, "Inference time vs candidate pairs", "candidate pairs P",
                  "time (ms)", {single, pairwise});
}

}  // namespace calipso
