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

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace calipso::net {

/// Dense float tensor in channel-planar (C,H,W) layout.
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<float> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_) {}

  std::size_t size() const { return v.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  float& at(int ci, int y, int x) { return v[ci * plane() + static_cast<std::size_t>(y) * w + x]; }
  float at(int ci, int y, int x) const {
    return v[ci * plane() + static_cast<std::size_t>(y) * w + x];
  }
  void zero() { std::fill(v.begin(), v.end(), 0.0f); }
};

/// A value and its (lazily allocated) gradient.
struct Variable {
  Tensor value;
  Tensor grad;

  explicit Variable(Tensor t) : value(std::move(t)) {}
  void ensure_grad() {
    if (grad.v.empty()) grad = Tensor(value.c, value.h, value.w);
  }
};
using VarPtr = std::shared_ptr<Variable>;

inline VarPtr make_var(Tensor t) { return std::make_shared<Variable>(std::move(t)); }

/// Reverse-mode tape: forward ops push their backward closure; backward()
/// runs them in reverse order.
class Tape {
 public:
  bool recording = false;
  void push(std::function<void()> op) {
    if (recording) ops_.push_back(std::move(op));
  }
  void backward() {
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
    ops_.clear();
  }
  void clear() { ops_.clear(); }

 private:
  std::vector<std::function<void()>> ops_;
};

/// Multiply-accumulate counter threaded through forward passes; the
/// complexity benchmark relies on it as hardware-independent evidence.
struct OpCounter {
  std::uint64_t macs = 0;
};

}  // namespace calipso::net
