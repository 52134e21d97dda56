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

#include "nn/fusion.hpp"

#include "core/error.hpp"

namespace stdmmf {

Tensor gate_mask(const Tensor& weights, double threshold) {
    if (weights.ndim() != 3 || weights.dim(2) != 2)
        throw ShapeError("gate_mask: expected an (N,K,2) table, got " + weights.shape_str());
    Tensor mask(weights.shape(), 1.0);
    const int n = weights.dim(0), k = weights.dim(1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) {
            const int64_t base = (static_cast<int64_t>(i) * k + j) * 2;
            const double diff = weights[base] - weights[base + 1];
            if (diff >= threshold)
                mask[base + 1] = 0.0;
            else if (diff <= -threshold)
                mask[base] = 0.0;
        }
    return mask;
}

Variable gate_weights(const Variable& weights, double threshold) {
    if (threshold < 0.0 || threshold > 1.0)
        throw ConfigError("gate_weights: threshold must lie in [0,1], got " + std::to_string(threshold));
    return mul_mask(weights, gate_mask(weights.value(), threshold));
}

MixLevels::MixLevels(const std::array<int, 5>& level_channels, Rng& rng) {
    for (int i = 0; i < 5; ++i) {
        cbr_[static_cast<size_t>(i)] = std::make_unique<ConvBnRelu>(level_channels[static_cast<size_t>(i)], 64, rng);
        add_child("cbr" + std::to_string(i + 1), *cbr_[static_cast<size_t>(i)]);
    }
}

std::array<Variable, 5> MixLevels::forward(const std::array<Variable, 5>& ls, const std::array<Variable, 5>& lt,
                                           const Variable& gated) const {
    std::array<Variable, 5> mix;
    for (int i = 0; i < 5; ++i) {
        if (!ls[static_cast<size_t>(i)].value().same_shape(lt[static_cast<size_t>(i)].value()))
            throw ShapeError("mix_levels: level " + std::to_string(i + 1) + " shapes differ, " +
                             ls[static_cast<size_t>(i)].value().shape_str() + " vs " +
                             lt[static_cast<size_t>(i)].value().shape_str());
        const Variable sum = add(scale_rows(ls[static_cast<size_t>(i)], slice_pair(gated, i, 0)),
                                 scale_rows(lt[static_cast<size_t>(i)], slice_pair(gated, i, 1)));
        mix[static_cast<size_t>(i)] = cbr_[static_cast<size_t>(i)]->forward(sum);
    }
    return mix;
}

Decoder::Decoder(Rng& rng)
    : cbr5_(64, 64, rng),
      cbr4_(64, 64, rng),
      cbr3_(64, 64, rng),
      cbr2_(64, 64, rng),
      cbr1_(64, 64, rng),
      cbr_head_(64, 64, rng),
      conv_out_(64, 1, 3, 3, rng) {
    add_child("cbr5", cbr5_);
    add_child("cbr4", cbr4_);
    add_child("cbr3", cbr3_);
    add_child("cbr2", cbr2_);
    add_child("cbr1", cbr1_);
    add_child("cbr_head", cbr_head_);
    add_child("conv_out", conv_out_);
}

Variable Decoder::forward(const std::array<Variable, 5>& mix, const Variable& bi_att, int out_h, int out_w,
                          Variable* fup1_out) const {
    const Tensor& m1 = mix[0].value();
    if (out_h < m1.h() || out_w < m1.w())
        throw ConfigError("decode: output size " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                          " is smaller than the finest mixed level " + m1.shape_str());
    auto size_of = [&](int i) { return std::pair{mix[static_cast<size_t>(i)].value().h(), mix[static_cast<size_t>(i)].value().w()}; };

    auto [h4, w4] = size_of(3);
    Variable f = upsample_bilinear(cbr5_.forward(mix[4]), h4, w4);  // Fup5
    auto [h3, w3] = size_of(2);
    f = upsample_bilinear(cbr4_.forward(add(f, mix[3])), h3, w3);  // Fup4
    auto [h2, w2] = size_of(1);
    f = upsample_bilinear(cbr3_.forward(add(f, mix[2])), h2, w2);  // Fup3
    auto [h1, w1] = size_of(0);
    f = upsample_bilinear(cbr2_.forward(add(f, mix[1])), h1, w1);  // Fup2
    const Variable fup1 = cbr1_.forward(add(mix[0], f));
    if (fup1_out) *fup1_out = fup1;
    const Variable fa = bi_att.defined() ? mul_channel_broadcast(fup1, bi_att) : fup1;
    const Variable head = cbr_head_.forward(add(fa, fup1));
    return sigmoid(upsample_bilinear(conv_out_.forward(head), out_h, out_w));
}

}  // namespace stdmmf
