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

#include <string>

#include "io/dataset.hpp"
#include "nn/model.hpp"

namespace stdmmf {

/// Runs the model over every sample and writes one 8-bit grayscale PNG per
/// frame at the original on-disk resolution, mirroring the input layout
/// (<out>/<video_id>/<stem>.png). With overlay set, a blended visualization
/// is written next to each map as <stem>_overlay.png. The caller is expected
/// to have put the model in eval mode.
void run_inference(const DualStreamNet& model, const Dataset& data, const std::string& out_dir, bool overlay);

/// Rebuilds overlays from saved prediction maps and the original frames.
void export_overlays(const std::string& pred_dir, const std::string& frames_dir, const std::string& out_dir);

}  // namespace stdmmf
