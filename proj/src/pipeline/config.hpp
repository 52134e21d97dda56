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

#include <cstdint>
#include <string>

#include "nn/model.hpp"

namespace stdmmf {

/// Training hyperparameters. Defaults follow the published recipe: SGD with
/// momentum 0.9, weight decay 1e-5, learning rate 1e-4, 65 epochs, groups of
/// four consecutive frames.
struct TrainConfig {
    int epochs = 65;
    double learning_rate = 0.0001;
    double momentum = 0.9;
    double weight_decay = 0.00001;
    int clip_len = 4;
    int input_size = 352;
    double loss_w1 = 0.6;
    double loss_w2 = 0.4;
    double gate_threshold = 0.5;
    uint64_t seed = 0;
    bool disable_temporal = false;
    bool disable_ila = false;
    bool disable_ilw = false;
    bool disable_bma = false;

    void validate() const;
    AblationFlags flags() const { return {disable_temporal, disable_ila, disable_ilw, disable_bma}; }
};

/// Flat `key = value` file; keys are exactly the TrainConfig fields, blank
/// lines and #-comments are ignored, unknown keys are errors.
TrainConfig parse_train_config_text(const std::string& text);
TrainConfig load_train_config(const std::string& path);
std::string serialize_train_config(const TrainConfig& cfg);

}  // namespace stdmmf
