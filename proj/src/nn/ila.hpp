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

#include "nn/layers.hpp"

namespace stdmmf {

/// Multi-receptive-field refinement: four parallel branches compress the
/// input to 64 channels, their concatenation is reduced back to 64 and added
/// to the first branch before the rectifier. Branch kernels:
///   branch0: 1x1
///   branch1: 1x1 -> 1x3 -> 3x1 -> 3x3
///   branch2: 1x1 -> 1x5 -> 5x1 -> 3x3
///   branch3: 1x1 -> 1x7 -> 7x1 -> 3x3
/// All convolutions are same-padded CBR blocks, so the spatial size is kept.
class MultiKernelRefine : public Module {
public:
    static constexpr int kWidth = 64;

    MultiKernelRefine(int in_channels, Rng& rng);
    Variable forward(const Variable& f) const;

private:
    ConvBnRelu b0_;
    ConvBnRelu b1a_, b1b_, b1c_, b1d_;
    ConvBnRelu b2a_, b2b_, b2c_, b2d_;
    ConvBnRelu b3a_, b3b_, b3c_, b3d_;
    Conv2d reduce_conv_;
    BatchNorm2d reduce_bn_;
};

/// Inter-layer attention between two adjacent pyramid levels. The refined
/// high-level feature is upsampled to the low level's size, convolved,
/// multiplied with the refined low-level feature, concatenated with a skip
/// projection and squashed to a single sigmoid channel.
class IlaModule : public Module {
public:
    IlaModule(int low_channels, int high_channels, Rng& rng);

    /// Output shape (N,1,h_low,w_low); requires the high level to be no
    /// larger spatially than the low level.
    Variable attention(const Variable& f_low, const Variable& f_high) const;

    const MultiKernelRefine& refine_low() const { return refine_low_; }

private:
    MultiKernelRefine refine_low_, refine_high_;
    Conv2d conv_up_;    // 1x1 after upsampling
    Conv2d conv_skip_;  // 1x1 projection of the upsampled feature
    Conv2d conv_head_;  // 128 -> 1, pre-sigmoid
};

/// x*a + x with the single-channel map broadcast over x's channels.
Variable apply_attention(const Variable& x, const Variable& a);

}  // namespace stdmmf
