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

/// 0/1 keep-mask for the threshold gate: per level, when the two stream
/// weights differ by at least `threshold` the smaller one is dropped. The
/// comparisons are non-strict, so a difference of exactly the threshold
/// fires. Entries that survive stay exactly as they were (no renormalizing),
/// and gradients flow only through the kept entries.
Tensor gate_mask(const Tensor& weights, double threshold);

/// Applies the gate to an (N,5,2) weight table. threshold must lie in [0,1].
Variable gate_weights(const Variable& weights, double threshold = 0.5);

/// Per-level mix of the two streams under the gated weights, each level then
/// compressed to the 64-channel decoder width by a CBR.
class MixLevels : public Module {
public:
    MixLevels(const std::array<int, 5>& level_channels, Rng& rng);

    std::array<Variable, 5> forward(const std::array<Variable, 5>& ls, const std::array<Variable, 5>& lt,
                                    const Variable& gated) const;

private:
    std::array<std::unique_ptr<ConvBnRelu>, 5> cbr_;
};

/// Coarse-to-fine decoder over the mixed pyramid. The bimodal attention
/// multiplies the finest fused feature; passing an undefined attention skips
/// that product (the ablated path behaves as an all-ones attention) while
/// the residual sum with Fup1 is kept either way. The head convolution output
/// is upsampled to the requested size and squashed by a sigmoid so the
/// returned map always lies in (0,1).
class Decoder : public Module {
public:
    explicit Decoder(Rng& rng);

    Variable forward(const std::array<Variable, 5>& mix, const Variable& bi_att, int out_h, int out_w,
                     Variable* fup1_out = nullptr) const;

private:
    ConvBnRelu cbr5_, cbr4_, cbr3_, cbr2_, cbr1_, cbr_head_;
    Conv2d conv_out_;
};

}  // namespace stdmmf
