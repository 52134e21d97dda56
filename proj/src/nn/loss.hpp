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

/// Saliency head over a stream's level-5 feature: 3x3 convolution to one
/// channel, upsampled to the supervision size and squashed by a sigmoid.
class SideOutput : public Module {
public:
    SideOutput(int in_channels, Rng& rng);
    Variable forward(const Variable& l5, int out_h, int out_w) const;

private:
    Conv2d conv_;
};

struct LossReport {
    double loss1 = 0.0;
    double loss2 = 0.0;
    double loss3 = 0.0;
    double total = 0.0;
};

/// total = w1*loss1 + w2*loss2 + loss3. Weights must be nonnegative.
LossReport total_loss(double loss1, double loss2, double loss3, double w1 = 0.6, double w2 = 0.4);

/// Tape-side variant used by training.
Variable combine_losses(const Variable& loss1, const Variable& loss2, const Variable& loss3, double w1 = 0.6,
                        double w2 = 0.4);

}  // namespace stdmmf
