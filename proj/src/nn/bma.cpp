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

#include "nn/bma.hpp"

#include "core/error.hpp"

namespace stdmmf {

StreamAttention::StreamAttention(int c4, int c5, Rng& rng)
    : cbr_l4_(c4, 64, rng), cbr_l5_(c5, 64, rng), cbr_cat_(128, 1, rng) {
    add_child("cbr_l4", cbr_l4_);
    add_child("cbr_l5", cbr_l5_);
    add_child("cbr_cat", cbr_cat_);
}

Variable StreamAttention::forward(const Variable& l4, const Variable& l5, const Variable& weight_sum, int target_h,
                                  int target_w) const {
    const int h4 = l4.value().h(), w4 = l4.value().w();
    if (target_h < h4 || target_w < w4)
        throw ShapeError("stream attention: target " + std::to_string(target_h) + "x" + std::to_string(target_w) +
                         " is smaller than the level-4 feature " + l4.value().shape_str());
    const Variable a = cbr_l4_.forward(l4);
    const Variable b = upsample_bilinear(cbr_l5_.forward(l5), h4, w4);
    const Variable s_cat = upsample_bilinear(cbr_cat_.forward(concat_channels({a, b})), target_h, target_w);
    return scale_rows(s_cat, weight_sum);
}

Variable bimodal_attention(const Variable& s_att, const Variable& t_att, const Variable& weight_total) {
    if (!s_att.value().same_shape(t_att.value()))
        throw ShapeError("bimodal_attention: stream maps differ, " + s_att.value().shape_str() + " vs " +
                         t_att.value().shape_str());
    const Tensor& wt = weight_total.value();
    for (int64_t i = 0; i < wt.numel(); ++i)
        if (!(wt[i] > 0.0))
            throw DomainError("bimodal_attention: weight total must be positive, got " + std::to_string(wt[i]));
    return sigmoid(div_rows(add(s_att, t_att), weight_total));
}

}  // namespace stdmmf
