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

#pragma once

#include "core/ops.hpp"
#include "nn/module.hpp"

namespace stdmmf {

/// Convolution layer. Weights are drawn from a zero-mean normal with
/// stddev sqrt(2/fan_in); biases start at zero. Convolutions feeding a batch
/// norm are built without bias.
class Conv2d : public Module {
public:
    Conv2d(int in_channels, int out_channels, int kh, int kw, Rng& rng, bool bias = true, int stride = 1,
           int pad_h = -1, int pad_w = -1, int dilation = 1);

    Variable forward(const Variable& x) const;

    const Variable& weight() const { return weight_; }
    const Variable& bias() const { return bias_; }

private:
    Variable weight_, bias_;
    Conv2dSpec spec_;
};

class BatchNorm2d : public Module {
public:
    explicit BatchNorm2d(int channels, double momentum = 0.1, double eps = 1e-5);

    Variable forward(const Variable& x) const;

private:
    Variable gamma_, beta_;
    Tensor* running_mean_;
    Tensor* running_var_;
    double momentum_, eps_;
};

/// While alive (thread local), training-mode batch norms keep normalizing by
/// batch statistics but leave their running stats untouched. Used by the
/// spatial stream so only the second (attention-injected) pass, whose
/// activations the decoder consumes, drives the stats used at eval time.
class BnStatsFreezeGuard {
public:
    BnStatsFreezeGuard();
    ~BnStatsFreezeGuard();
    BnStatsFreezeGuard(const BnStatsFreezeGuard&) = delete;
    BnStatsFreezeGuard& operator=(const BnStatsFreezeGuard&) = delete;
    static bool active();
};

/// Convolution + batch norm + rectifier, same-padded. kw == 0 means a square
/// kernel. The 3x3 default is the CBR block used throughout the fusion paths.
class ConvBnRelu : public Module {
public:
    ConvBnRelu(int in_channels, int out_channels, Rng& rng, int kh = 3, int kw = 0, int stride = 1,
               int dilation = 1);

    Variable forward(const Variable& x) const;

private:
    Conv2d conv_;
    BatchNorm2d bn_;
};

}  // namespace stdmmf
