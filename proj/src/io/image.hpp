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

#include "core/tensor.hpp"

namespace stdmmf {

/// Decoded image helpers. Color tensors are (3,H,W) RGB in [0,1]; grayscale
/// maps are (H,W) in [0,1].
Tensor load_image_rgb(const std::string& path);
Tensor load_image_gray(const std::string& path);

/// 8-bit grayscale PNG; values are clamped to [0,1] and quantized by
/// round-half-away-from-zero to 0..255.
void save_image_gray(const std::string& path, const Tensor& map);
void save_image_rgb(const std::string& path, const Tensor& chw);

Tensor resize_rgb_bilinear(const Tensor& chw, int h, int w);
Tensor resize_map_bilinear(const Tensor& map, int h, int w);
Tensor resize_map_nearest(const Tensor& map, int h, int w);

/// Width/height from the PNG header without a full decode.
std::pair<int, int> png_size(const std::string& path);  // (h, w)

/// Saliency visualization: the map is blended toward red over the frame with
/// per-pixel alpha 0.5 * saliency.
Tensor overlay_saliency(const Tensor& frame_rgb, const Tensor& map);

}  // namespace stdmmf
