// Copyright 2026 the stdmmf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nn/layers.hpp"

#include <cmath>

#include "core/error.hpp"

namespace stdmmf {

Conv2d::Conv2d(int in_channels, int out_channels, int kh, int kw, Rng& rng, bool bias, int stride, int pad_h,
               int pad_w, int dilation) {
    if (in_channels < 1 || out_channels < 1) throw ConfigError("Conv2d: channel counts must be >= 1");
    spec_.stride = stride;
    spec_.dil_h = dilation;
    spec_.dil_w = dilation;
    // -1 requests same padding (odd kernels only, which is all we build).
    spec_.pad_h = pad_h >= 0 ? pad_h : dilation * (kh - 1) / 2;
    spec_.pad_w = pad_w >= 0 ? pad_w : dilation * (kw - 1) / 2;

    const double fan_in = static_cast<double>(in_channels) * kh * kw;
    const double stddev = std::sqrt(2.0 / fan_in);
    Tensor w({out_channels, in_channels, kh, kw});
    for (int64_t i = 0; i < w.numel(); ++i) w[i] = rng.normal(0.0, stddev);
    weight_ = add_parameter("weight", std::move(w));
    if (bias) bias_ = add_parameter("bias", Tensor({out_channels}));
}

Variable Conv2d::forward(const Variable& x) const { return conv2d(x, weight_, bias_, spec_); }

BatchNorm2d::BatchNorm2d(int channels, double momentum, double eps) : momentum_(momentum), eps_(eps) {
    gamma_ = add_parameter("weight", Tensor({channels}, 1.0));
    beta_ = add_parameter("bias", Tensor({channels}));
    running_mean_ = &add_buffer("running_mean", Tensor({channels}));
    running_var_ = &add_buffer("running_var", Tensor({channels}, 1.0));
}

namespace {
thread_local int g_bn_freeze_depth = 0;
}

BnStatsFreezeGuard::BnStatsFreezeGuard() { ++g_bn_freeze_depth; }
BnStatsFreezeGuard::~BnStatsFreezeGuard() { --g_bn_freeze_depth; }
bool BnStatsFreezeGuard::active() { return g_bn_freeze_depth > 0; }

Variable BatchNorm2d::forward(const Variable& x) const {
    return batch_norm(x, gamma_, beta_, *running_mean_, *running_var_, training(), momentum_, eps_,
                      !BnStatsFreezeGuard::active());
}

ConvBnRelu::ConvBnRelu(int in_channels, int out_channels, Rng& rng, int kh, int kw, int stride, int dilation)
    : conv_(in_channels, out_channels, kh, kw == 0 ? kh : kw, rng, /*bias=*/false, stride, -1, -1, dilation),
      bn_(out_channels) {
    add_child("conv", conv_);
    add_child("bn", bn_);
}

Variable ConvBnRelu::forward(const Variable& x) const { return relu(bn_.forward(conv_.forward(x))); }

}  // namespace stdmmf
