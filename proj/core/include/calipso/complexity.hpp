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

#include <string>
#include <vector>

#include "calipso/inference.hpp"
#include "calipso/pairwise.hpp"
#include "calipso/types.hpp"

namespace calipso {

/// One sweep point: P candidate pairs, wall times (medians over repeats) and
/// forward multiply-accumulate counts for the single-shot path and the
/// per-pair baseline.
struct BenchmarkRecord {
  int scene_id = 0;
  int pairs = 0;  // P = N * M
  double single_shot_ms = 0;
  double baseline_ms = 0;
  std::uint64_t single_shot_ops = 0;
  std::uint64_t baseline_ops = 0;
};

struct ComplexityConfig {
  int max_pairs = 64;      // sweep P = 1..max_pairs
  int pair_step = 1;
  int repeats = 20;        // timed repeats per point (medians reported)
  int warmups = 3;
  int image_size = 128;
  double threshold = 0.05;
  std::uint64_t seed = 5;
};

/// A synthetic benchmark scene: one human and `objects` small targets laid
/// out on a grid; content is irrelevant to cost, only counts matter.
Scene make_benchmark_scene(int objects, int image_size);

/// Runs both inference paths over the sweep. The single-shot path does one
/// full forward per scene regardless of P; the baseline runs its subnetwork
/// once per pair.
std::vector<BenchmarkRecord> benchmark_complexity(net::InteractionModel& model,
                                                  PairwiseBaseline& baseline,
                                                  const VerbVocabulary& vocabulary,
                                                  const AnchorGridConfig& grid_config,
                                                  const ComplexityConfig& config);

void write_benchmark_records(const std::string& path,
                             const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_benchmark_records(const std::string& path);

/// Time-vs-pairs plot of both paths (SVG).
void write_benchmark_plot(const std::string& path,
                          const std::vector<BenchmarkRecord>& records);

}  // namespace calipso
