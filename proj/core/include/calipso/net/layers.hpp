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
#include <random>
#include <string>
#include <vector>

#include "calipso/net/tensor.hpp"

namespace calipso::net {

/// One learnable array with gradient and momentum buffers.
struct ParamBlock {
  std::string name;
  std::vector<float> w, g, m;
  bool weight_decay = true;

  void resize(std::size_t n) {
    w.assign(n, 0.0f);
    g.assign(n, 0.0f);
    m.assign(n, 0.0f);
  }
};

struct Conv2d {
  int in_c = 0, out_c = 0, ksize = 3, stride = 1, pad = 1;
  ParamBlock weight;  // out_c x (in_c * k * k)
  ParamBlock bias;    // out_c, no decay

  void init(int in, int out, int k, int s, int p, const std::string& name, std::mt19937_64& rng);
  VarPtr forward(Tape& tape, const VarPtr& x, OpCounter* ops);
};

/// Channel normalization over the spatial plane with learnable scale/shift.
/// Statistics always come from the current sample (single-image batches make
/// batch statistics degenerate to instance statistics), so training and
/// evaluation behave identically.
struct BatchNorm {
  int channels = 0;
  double eps = 1e-5;
  ParamBlock gamma;  // no decay
  ParamBlock beta;   // no decay

  void init(int c, const std::string& name);
  VarPtr forward(Tape& tape, const VarPtr& x, OpCounter* ops);
};

VarPtr relu(Tape& tape, const VarPtr& x);
VarPtr upsample2x_to(Tape& tape, const VarPtr& x, int out_h, int out_w);
VarPtr add(Tape& tape, const VarPtr& a, const VarPtr& b);

/// Global average pool to a 1x1 map (used by the pairwise baseline).
VarPtr global_avg_pool(Tape& tape, const VarPtr& x, OpCounter* ops);

}  // namespace calipso::net
