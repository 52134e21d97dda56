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

#include "nn/layers.hpp"

namespace stdmmf {

/// Per-level salient-content descriptor of one stream. Every level is
/// compressed to 64 channels by a CBR, levels 2..5 are upsampled to level 1's
/// spatial size, the concatenation is fused to a 5-channel map and globally
/// average-pooled into 5 scalars (one per level).
class StreamDescriptor : public Module {
public:
    StreamDescriptor(const std::array<int, 5>& level_channels, Rng& rng);

    /// levels are ordered 1..5 with level 1 spatially largest; output (N,5).
    Variable forward(const std::array<Variable, 5>& levels) const;

private:
    std::array<std::unique_ptr<ConvBnRelu>, 5> cbr_;
    Conv2d fuse_conv_;
    BatchNorm2d fuse_bn_;
};

/// Softmax across the two streams per level: (N,5) x (N,5) -> (N,5,2) with
/// each row summing to 1. Column 0 is the spatial stream.
Variable interlayer_weight(const Variable& weight_s, const Variable& weight_t);

}  // namespace stdmmf
