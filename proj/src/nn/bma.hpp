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

/// High-level evidence of one stream collapsed to a single-channel map at
/// decoder resolution and scaled by the stream's total inter-layer weight.
class StreamAttention : public Module {
public:
    StreamAttention(int c4, int c5, Rng& rng);

    /// l4/l5 are the stream's two highest levels; weight_sum is (N,), the sum
    /// of that stream's weight column; target must be at least l4's size.
    Variable forward(const Variable& l4, const Variable& l5, const Variable& weight_sum, int target_h,
                     int target_w) const;

private:
    ConvBnRelu cbr_l4_;
    ConvBnRelu cbr_l5_;
    ConvBnRelu cbr_cat_;
};

/// Sigmoid of the weight-normalized sum of the two stream attentions.
/// weight_total is (N,) and must be strictly positive (it is the sum of all
/// softmax weights, 5 by construction; the guard catches corrupted state).
Variable bimodal_attention(const Variable& s_att, const Variable& t_att, const Variable& weight_total);

}  // namespace stdmmf
