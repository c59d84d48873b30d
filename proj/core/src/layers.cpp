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

#include "calipso/net/layers.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace calipso::net {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

int conv_extent(int in, int k, int stride, int pad) { return (in + 2 * pad - k) / stride + 1; }

// col is (in_c*k*k) x (oh*ow), row-major.
void im2col(const Tensor& x, int k, int stride, int pad, int oh, int ow, float* col) {
  const int positions = oh * ow;
  for (int ic = 0; ic < x.c; ++ic) {
    const float* plane = x.v.data() + ic * x.plane();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        float* row = col + (static_cast<std::size_t>((ic * k + ky) * k + kx)) * positions;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= x.h) {
            std::fill(row + oy * ow, row + (oy + 1) * ow, 0.0f);
            continue;
          }
          const float* src = plane + static_cast<std::size_t>(iy) * x.w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            row[oy * ow + ox] = (ix >= 0 && ix < x.w) ? src[ix] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im_accumulate(const float* col, int k, int stride, int pad, int oh, int ow, Tensor& dx) {
  const int positions = oh * ow;
  for (int ic = 0; ic < dx.c; ++ic) {
    float* plane = dx.v.data() + ic * dx.plane();
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const float* row = col + (static_cast<std::size_t>((ic * k + ky) * k + kx)) * positions;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= dx.h) continue;
          float* dst = plane + static_cast<std::size_t>(iy) * dx.w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < dx.w) dst[ix] += row[oy * ow + ox];
          }
        }
      }
    }
  }
}

}  // namespace

void Conv2d::init(int in, int out, int k, int s, int p, const std::string& name,
                  std::mt19937_64& rng) {
  in_c = in;
  out_c = out;
  ksize = k;
  stride = s;
  pad = p;
  weight.name = name + ".weight";
  bias.name = name + ".bias";
  weight.resize(static_cast<std::size_t>(out) * in * k * k);
  bias.resize(out);
  bias.weight_decay = false;
  const double std_dev = std::sqrt(2.0 / (static_cast<double>(in) * k * k));
  std::normal_distribution<double> dist(0.0, std_dev);
  for (auto& x : weight.w) x = static_cast<float>(dist(rng));
}

VarPtr Conv2d::forward(Tape& tape, const VarPtr& x, OpCounter* ops) {
  // Stride-2 convolutions halve with floor semantics so that composing
  // stages yields feature maps of exactly floor(W / 2^l) x floor(H / 2^l).
  const int oh = stride == 2 ? x->value.h / 2 : conv_extent(x->value.h, ksize, stride, pad);
  const int ow = stride == 2 ? x->value.w / 2 : conv_extent(x->value.w, ksize, stride, pad);
  const int positions = oh * ow;
  const int taps = in_c * ksize * ksize;

  auto col = std::make_shared<std::vector<float>>(static_cast<std::size_t>(taps) * positions);
  im2col(x->value, ksize, stride, pad, oh, ow, col->data());

  auto out = make_var(Tensor(out_c, oh, ow));
  {
    ConstMapMat wm(weight.w.data(), out_c, taps);
    ConstMapMat cm(col->data(), taps, positions);
    MapMat ym(out->value.v.data(), out_c, positions);
    ym.noalias() = wm * cm;
    for (int oc = 0; oc < out_c; ++oc) ym.row(oc).array() += bias.w[oc];
  }
  if (ops) ops->macs += static_cast<std::uint64_t>(out_c) * positions * taps;

  if (tape.recording) {
    auto self = this;
    VarPtr xin = x;
    tape.push([self, xin, out, col, oh, ow, positions, taps]() {
      if (out->grad.v.empty()) return;
      ConstMapMat dym(out->grad.v.data(), self->out_c, positions);
      ConstMapMat cm(col->data(), taps, positions);
      // Parameter gradients.
      MapMat dwm(self->weight.g.data(), self->out_c, taps);
      dwm.noalias() += dym * cm.transpose();
      for (int oc = 0; oc < self->out_c; ++oc) {
        const float* row = out->grad.v.data() + static_cast<std::size_t>(oc) * positions;
        double s = 0;
        for (int i = 0; i < positions; ++i) s += row[i];
        self->bias.g[oc] += static_cast<float>(s);
      }
      // Input gradient.
      xin->ensure_grad();
      std::vector<float> dcol(static_cast<std::size_t>(taps) * positions);
      MapMat dcm(dcol.data(), taps, positions);
      ConstMapMat wm(self->weight.w.data(), self->out_c, taps);
      dcm.noalias() = wm.transpose() * dym;
      col2im_accumulate(dcol.data(), self->ksize, self->stride, self->pad, oh, ow, xin->grad);
    });
  }
  return out;
}

void BatchNorm::init(int c, const std::string& name) {
  channels = c;
  gamma.name = name + ".gamma";
  beta.name = name + ".beta";
  gamma.resize(c);
  beta.resize(c);
  gamma.weight_decay = false;
  beta.weight_decay = false;
  std::fill(gamma.w.begin(), gamma.w.end(), 1.0f);
}

VarPtr BatchNorm::forward(Tape& tape, const VarPtr& x, OpCounter* ops) {
  const int n = static_cast<int>(x->value.plane());
  auto out = make_var(Tensor(x->value.c, x->value.h, x->value.w));
  auto mean = std::make_shared<std::vector<float>>(channels);
  auto inv_std = std::make_shared<std::vector<float>>(channels);

  for (int c = 0; c < channels; ++c) {
    const float* src = x->value.v.data() + c * static_cast<std::size_t>(n);
    double m = 0;
    for (int i = 0; i < n; ++i) m += src[i];
    m /= n;
    double var = 0;
    for (int i = 0; i < n; ++i) {
      const double d = src[i] - m;
      var += d * d;
    }
    var /= n;
    const float is = static_cast<float>(1.0 / std::sqrt(var + eps));
    (*mean)[c] = static_cast<float>(m);
    (*inv_std)[c] = is;
    float* dst = out->value.v.data() + c * static_cast<std::size_t>(n);
    const float g = gamma.w[c], b = beta.w[c];
    for (int i = 0; i < n; ++i) dst[i] = (src[i] - (*mean)[c]) * is * g + b;
  }
  if (ops) ops->macs += static_cast<std::uint64_t>(channels) * n * 2;

  if (tape.recording) {
    auto self = this;
    VarPtr xin = x;
    tape.push([self, xin, out, mean, inv_std, n]() {
      if (out->grad.v.empty()) return;
      xin->ensure_grad();
      for (int c = 0; c < self->channels; ++c) {
        const float* xv = xin->value.v.data() + c * static_cast<std::size_t>(n);
        const float* dy = out->grad.v.data() + c * static_cast<std::size_t>(n);
        float* dx = xin->grad.v.data() + c * static_cast<std::size_t>(n);
        const float mu = (*mean)[c], is = (*inv_std)[c], g = self->gamma.w[c];
        double sum_dy = 0, sum_dy_xhat = 0;
        for (int i = 0; i < n; ++i) {
          const double xhat = (xv[i] - mu) * is;
          sum_dy += dy[i];
          sum_dy_xhat += dy[i] * xhat;
        }
        self->gamma.g[c] += static_cast<float>(sum_dy_xhat);
        self->beta.g[c] += static_cast<float>(sum_dy);
        const double mean_dy = sum_dy / n;
        const double mean_dy_xhat = sum_dy_xhat / n;
        for (int i = 0; i < n; ++i) {
          const double xhat = (xv[i] - mu) * is;
          dx[i] += static_cast<float>(g * is * (dy[i] - mean_dy - xhat * mean_dy_xhat));
        }
      }
    });
  }
  return out;
}

VarPtr relu(Tape& tape, const VarPtr& x) {
  auto out = make_var(Tensor(x->value.c, x->value.h, x->value.w));
  for (std::size_t i = 0; i < x->value.size(); ++i)
    out->value.v[i] = x->value.v[i] > 0 ? x->value.v[i] : 0.0f;
  if (tape.recording) {
    VarPtr xin = x;
    tape.push([xin, out]() {
      if (out->grad.v.empty()) return;
      xin->ensure_grad();
      for (std::size_t i = 0; i < xin->value.size(); ++i)
        if (xin->value.v[i] > 0) xin->grad.v[i] += out->grad.v[i];
    });
  }
  return out;
}

VarPtr upsample2x_to(Tape& tape, const VarPtr& x, int out_h, int out_w) {
  auto out = make_var(Tensor(x->value.c, out_h, out_w));
  for (int c = 0; c < x->value.c; ++c)
    for (int y = 0; y < out_h; ++y)
      for (int xx = 0; xx < out_w; ++xx) {
        const int sy = std::min(y / 2, x->value.h - 1);
        const int sx = std::min(xx / 2, x->value.w - 1);
        out->value.at(c, y, xx) = x->value.at(c, sy, sx);
      }
  if (tape.recording) {
    VarPtr xin = x;
    tape.push([xin, out, out_h, out_w]() {
      if (out->grad.v.empty()) return;
      xin->ensure_grad();
      for (int c = 0; c < xin->value.c; ++c)
        for (int y = 0; y < out_h; ++y)
          for (int xx = 0; xx < out_w; ++xx) {
            const int sy = std::min(y / 2, xin->value.h - 1);
            const int sx = std::min(xx / 2, xin->value.w - 1);
            xin->grad.at(c, sy, sx) += out->grad.at(c, y, xx);
          }
    });
  }
  return out;
}

VarPtr add(Tape& tape, const VarPtr& a, const VarPtr& b) {
  auto out = make_var(Tensor(a->value.c, a->value.h, a->value.w));
  for (std::size_t i = 0; i < a->value.size(); ++i)
    out->value.v[i] = a->value.v[i] + b->value.v[i];
  if (tape.recording) {
    VarPtr av = a, bv = b;
    tape.push([av, bv, out]() {
      if (out->grad.v.empty()) return;
      av->ensure_grad();
      bv->ensure_grad();
      for (std::size_t i = 0; i < out->grad.v.size(); ++i) {
        av->grad.v[i] += out->grad.v[i];
        bv->grad.v[i] += out->grad.v[i];
      }
    });
  }
  return out;
}

VarPtr global_avg_pool(Tape& tape, const VarPtr& x, OpCounter* ops) {
  auto out = make_var(Tensor(x->value.c, 1, 1));
  const int n = static_cast<int>(x->value.plane());
  for (int c = 0; c < x->value.c; ++c) {
    const float* src = x->value.v.data() + c * static_cast<std::size_t>(n);
    double s = 0;
    for (int i = 0; i < n; ++i) s += src[i];
    out->value.v[c] = static_cast<float>(s / n);
  }
  if (ops) ops->macs += x->value.size();
  if (tape.recording) {
    VarPtr xin = x;
    tape.push([xin, out, n]() {
      if (out->grad.v.empty()) return;
      xin->ensure_grad();
      for (int c = 0; c < xin->value.c; ++c) {
        const float g = out->grad.v[c] / n;
        float* dst = xin->grad.v.data() + c * static_cast<std::size_t>(n);
        for (int i = 0; i < n; ++i) dst[i] += g;
      }
    });
  }
  return out;
}

}  // namespace calipso::net
