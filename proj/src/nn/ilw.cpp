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

#include "nn/ilw.hpp"

#include "core/error.hpp"

namespace stdmmf {

namespace {
constexpr int kWidth = 64;
}

StreamDescriptor::StreamDescriptor(const std::array<int, 5>& level_channels, Rng& rng)
    : fuse_conv_(5 * kWidth, 5, 3, 3, rng, /*bias=*/false), fuse_bn_(5) {
    for (int i = 0; i < 5; ++i) {
        cbr_[static_cast<size_t>(i)] =
            std::make_unique<ConvBnRelu>(level_channels[static_cast<size_t>(i)], kWidth, rng);
        add_child("cbr" + std::to_string(i + 1), *cbr_[static_cast<size_t>(i)]);
    }
    add_child("fuse_conv", fuse_conv_);
    add_child("fuse_bn", fuse_bn_);
}

Variable StreamDescriptor::forward(const std::array<Variable, 5>& levels) const {
    const int h = levels[0].value().h(), w = levels[0].value().w();
    std::vector<Variable> parts;
    parts.reserve(5);
    parts.push_back(cbr_[0]->forward(levels[0]));
    for (int i = 1; i < 5; ++i) {
        const Tensor& lv = levels[static_cast<size_t>(i)].value();
        if (lv.h() > h || lv.w() > w)
            throw ShapeError("stream descriptor: level " + std::to_string(i + 1) + " " + lv.shape_str() +
                             " is larger than level 1");
        parts.push_back(upsample_bilinear(cbr_[static_cast<size_t>(i)]->forward(levels[static_cast<size_t>(i)]), h, w));
    }
    const Variable fused = relu(fuse_bn_.forward(fuse_conv_.forward(concat_channels(parts))));
    return reshape(global_avg_pool(fused), {fused.value().n(), 5});
}

Variable interlayer_weight(const Variable& weight_s, const Variable& weight_t) {
    const Tensor& ws = weight_s.value();
    const Tensor& wt = weight_t.value();
    if (ws.ndim() != 2 || ws.dim(1) != 5 || !ws.same_shape(wt))
        throw ShapeError("interlayer_weight: descriptors must both be (N,5), got " + ws.shape_str() + " and " +
                         wt.shape_str());
    return softmax_pairs(weight_s, weight_t);
}

}  // namespace stdmmf
