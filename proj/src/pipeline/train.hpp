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

#include <functional>
#include <string>
#include <vector>

#include "io/dataset.hpp"
#include "nn/loss.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/config.hpp"

namespace stdmmf {

struct StepStats {
    int epoch = 0;
    int step = 0;  // global step index, 1-based
    LossReport losses;
};

struct TrainOptions {
    std::string out_dir;        // checkpoints + log; empty disables writing
    bool deterministic = false; // single-threaded data path (compute already is)
    int max_steps = 0;          // stop early after this many steps; 0 = all
    std::function<void(const StepStats&)> on_step;  // optional observer
};

/// Groups of clip_len consecutive frames of one video form a batch; group
/// order is reshuffled each epoch from the config seed. Checkpoints are
/// written per epoch (epoch_NNN.ckpt plus latest.ckpt). Returns the path of
/// the last checkpoint written, or empty when out_dir is empty.
std::string train_model(DualStreamNet& model, const TrainConfig& cfg, const Dataset& data,
                        const TrainOptions& opts = {}, std::vector<StepStats>* stats = nullptr);

/// Consecutive-frame groups per video, in dataset order.
std::vector<std::vector<size_t>> build_groups(const Dataset& data, int clip_len);

}  // namespace stdmmf
