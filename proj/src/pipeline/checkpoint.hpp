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

#include <optional>
#include <string>
#include <vector>

#include "pipeline/config.hpp"
#include "pipeline/optimizer.hpp"

namespace stdmmf {

/// Checkpoint container: 8 magic bytes ("STDMMFCP"), a text header with the
/// format version, the train/backbone config snapshot, epoch counter and RNG
/// state, a manifest line per tensor (name, dtype, shape, byte offset into
/// the payload) terminated by "@payload", then the little-endian 32-bit
/// float payloads in manifest order. Writes go to a temp file followed by an
/// atomic rename. Optimizer momentum lives under the reserved
/// "opt.momentum." name prefix.
struct CheckpointHeader {
    int version = 1;
    TrainConfig train_config;
    BackboneConfig backbone;
    int epoch = 0;
    std::string rng_state;
};

void save_checkpoint(const std::string& path, const DualStreamNet& model, const TrainConfig& cfg, int epoch,
                     const std::string& rng_state, const SgdOptimizer* opt = nullptr);

/// Header only (no tensor data); used to rebuild the model before loading.
CheckpointHeader read_checkpoint_header(const std::string& path);

/// Validates the manifest against the model (and optimizer when given) and
/// fills every tensor. The model is untouched unless validation succeeds.
/// When opt is null, "opt.momentum.*" entries are skipped; any other unknown,
/// missing or misshaped name fails with a message listing every offender.
CheckpointHeader load_checkpoint(const std::string& path, DualStreamNet& model, SgdOptimizer* opt = nullptr);

}  // namespace stdmmf
