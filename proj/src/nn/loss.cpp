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

#include "nn/loss.hpp"

#include "core/error.hpp"

namespace stdmmf {

SideOutput::SideOutput(int in_channels, Rng& rng) : conv_(in_channels, 1, 3, 3, rng) { add_child("conv", conv_); }

Variable SideOutput::forward(const Variable& l5, int out_h, int out_w) const {
    return sigmoid(upsample_bilinear(conv_.forward(l5), out_h, out_w));
}

LossReport total_loss(double loss1, double loss2, double loss3, double w1, double w2) {
    if (w1 < 0.0 || w2 < 0.0)
        throw ConfigError("total_loss: weights must be nonnegative, got " + std::to_string(w1) + ", " +
                          std::to_string(w2));
    LossReport r;
    r.loss1 = loss1;
    r.loss2 = loss2;
    r.loss3 = loss3;
    r.total = w1 * loss1 + w2 * loss2 + loss3;
    return r;
}

Variable combine_losses(const Variable& loss1, const Variable& loss2, const Variable& loss3, double w1, double w2) {
    if (w1 < 0.0 || w2 < 0.0)
        throw ConfigError("combine_losses: weights must be nonnegative, got " + std::to_string(w1) + ", " +
                          std::to_string(w2));
    return add(add(scale(loss1, w1), scale(loss2, w2)), loss3);
}

}  // namespace stdmmf
