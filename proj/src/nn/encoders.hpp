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

#include <array>
#include <memory>

#include "nn/ila.hpp"
#include "nn/layers.hpp"

namespace stdmmf {

/// Residual-encoder topology. The default schedule reproduces the ResNet-34
/// layout: stem downsampling by 4, then four basic-block levels with strides
/// (1,2,2,2). The reduced schedule keeps tests fast.
struct BackboneConfig {
    int in_channels = 3;
    std::array<int, 4> width_schedule{64, 128, 256, 512};
    std::array<int, 4> block_counts{3, 4, 6, 3};
    int aspp_out_channels = 64;
    int input_size = 352;

    void validate() const;
    std::array<int, 5> level_channels() const {
        return {width_schedule[0], width_schedule[1], width_schedule[2], width_schedule[3], aspp_out_channels};
    }

    static BackboneConfig resnet34(int input_size = 352);
    static BackboneConfig tiny(int input_size = 32);
};

class BasicBlock : public Module {
public:
    BasicBlock(int in_channels, int out_channels, int stride, Rng& rng);
    Variable forward(const Variable& x) const;

private:
    Conv2d conv1_;
    BatchNorm2d bn1_;
    Conv2d conv2_;
    BatchNorm2d bn2_;
    std::unique_ptr<Conv2d> down_conv_;
    std::unique_ptr<BatchNorm2d> down_bn_;
};

class ResidualLevel : public Module {
public:
    ResidualLevel(int in_channels, int out_channels, int blocks, int stride, Rng& rng);
    Variable forward(const Variable& x) const;

private:
    std::vector<std::unique_ptr<BasicBlock>> blocks_;
};

/// Atrous spatial pyramid pooling: parallel dilated 3x3 convolutions at rates
/// 1/6/12/18 plus a pooled branch broadcast back to the input resolution,
/// concatenated and reduced by a 1x1 CBR. Spatial size is preserved.
class Aspp : public Module {
public:
    Aspp(int in_channels, int out_channels, Rng& rng);
    Variable forward(const Variable& x) const;

private:
    std::array<std::unique_ptr<Conv2d>, 4> branches_;
    Conv2d pool_conv_;
    ConvBnRelu reduce_;
};

class Backbone : public Module {
public:
    Backbone(const BackboneConfig& cfg, Rng& rng);

    Variable stem(const Variable& image) const;
    Variable run_level(int level, const Variable& x) const;  // level in 1..4
    Variable run_aspp(const Variable& f4) const;

    /// Plain five-level pyramid: f1..f4 are the level outputs, f5 = aspp(f4).
    /// Input height/width must be divisible by 32.
    std::array<Variable, 5> extract_pyramid(const Variable& image) const;

    void validate_input(const Tensor& image) const;

    const BackboneConfig& config() const { return cfg_; }

private:
    BackboneConfig cfg_;
    Conv2d stem_conv_;
    BatchNorm2d stem_bn_;
    std::array<std::unique_ptr<ResidualLevel>, 4> levels_;
    Aspp aspp_;
};

struct SpatialStreamOut {
    std::array<Variable, 5> levels;      // L1S..L5S
    std::array<Variable, 4> attentions;  // A1..A4; undefined when attention is off
};

/// Attention-injected spatial encoder. Pass 1 extracts the plain pyramid and
/// the inter-layer attentions; pass 2 re-runs levels 2..4 with each level
/// input modulated as x*A + x. Both passes share the backbone parameters.
class SpatialStream : public Module {
public:
    SpatialStream(const BackboneConfig& cfg, Rng& rng);

    SpatialStreamOut forward(const Variable& frame, bool use_attention = true) const;

    /// Second pass with caller-supplied attention maps; f1 is the plain
    /// first-level feature the injection starts from.
    std::array<Variable, 5> forward_injected(const Variable& f1, const std::array<Variable, 4>& attentions) const;

    const Backbone& backbone() const { return backbone_; }

private:
    Backbone backbone_;
    std::array<std::unique_ptr<IlaModule>, 4> ila_;
};

}  // namespace stdmmf
