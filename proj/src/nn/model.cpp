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

#include "nn/model.hpp"

#include "core/error.hpp"

namespace stdmmf {

namespace {

// Fixed per-level rows for the ablated weight table.
Variable fixed_weight_table(int n, double spatial, double temporal) {
    Tensor t({n, 5, 2});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 5; ++j) {
            t[(static_cast<int64_t>(i) * 5 + j) * 2] = spatial;
            t[(static_cast<int64_t>(i) * 5 + j) * 2 + 1] = temporal;
        }
    return Variable::constant(std::move(t));
}

}  // namespace

DualStreamNet::DualStreamNet(const BackboneConfig& cfg, uint64_t seed, AblationFlags flags, double gate_threshold)
    : cfg_((cfg.validate(), cfg)),
      flags_(flags),
      gate_threshold_(gate_threshold),
      seed_(seed),
      init_rng_(seed),
      spatial_(cfg_, init_rng_),
      temporal_(cfg_, init_rng_),
      ilw_spatial_(cfg_.level_channels(), init_rng_),
      ilw_temporal_(cfg_.level_channels(), init_rng_),
      bma_spatial_(cfg_.width_schedule[3], cfg_.aspp_out_channels, init_rng_),
      bma_temporal_(cfg_.width_schedule[3], cfg_.aspp_out_channels, init_rng_),
      mix_(cfg_.level_channels(), init_rng_),
      decoder_(init_rng_),
      side_spatial_(cfg_.aspp_out_channels, init_rng_),
      side_temporal_(cfg_.aspp_out_channels, init_rng_) {
    if (gate_threshold_ < 0.0 || gate_threshold_ > 1.0)
        throw ConfigError("gate threshold must lie in [0,1], got " + std::to_string(gate_threshold_));
    add_child("spatial", spatial_);
    add_child("temporal", temporal_);
    add_child("ilw_s", ilw_spatial_);
    add_child("ilw_t", ilw_temporal_);
    add_child("bma_s", bma_spatial_);
    add_child("bma_t", bma_temporal_);
    add_child("mix", mix_);
    add_child("decoder", decoder_);
    add_child("side_s", side_spatial_);
    add_child("side_t", side_temporal_);
}

ForwardResult DualStreamNet::forward(const Variable& frames, const Variable& flows) const {
    const Tensor& fr = frames.value();
    if (fr.ndim() != 4) throw ShapeError("forward: frames must be (N,3,H,W), got " + fr.shape_str());
    if (!flags_.disable_temporal && !fr.same_shape(flows.value()))
        throw ShapeError("forward: frame/flow shape mismatch, " + fr.shape_str() + " vs " +
                         flows.value().shape_str());
    const int n = fr.n(), out_h = fr.h(), out_w = fr.w();

    ForwardResult r;
    const SpatialStreamOut sp = spatial_.forward(frames, !flags_.disable_ila);
    r.spatial_levels = sp.levels;
    r.attentions = sp.attentions;

    if (flags_.disable_temporal) {
        for (int i = 0; i < 5; ++i)
            r.temporal_levels[static_cast<size_t>(i)] =
                Variable::constant(Tensor(sp.levels[static_cast<size_t>(i)].value().shape()));
    } else {
        r.temporal_levels = temporal_.extract_pyramid(flows);
    }

    if (flags_.disable_temporal) {
        r.interlayer = fixed_weight_table(n, 1.0, 0.0);
    } else if (flags_.disable_ilw) {
        r.interlayer = fixed_weight_table(n, 0.5, 0.5);
    } else {
        const Variable ws = ilw_spatial_.forward(r.spatial_levels);
        const Variable wt = ilw_temporal_.forward(r.temporal_levels);
        r.interlayer = interlayer_weight(ws, wt);
    }

    if (!flags_.disable_bma) {
        const int th = r.spatial_levels[0].value().h();
        const int tw = r.spatial_levels[0].value().w();
        const Variable ws_sum = sum_pairs_column(r.interlayer, 0);
        const Variable s_att = bma_spatial_.forward(r.spatial_levels[3], r.spatial_levels[4], ws_sum, th, tw);
        Variable t_att;
        if (flags_.disable_temporal) {
            // The temporal column is identically zero, so its attention is too.
            t_att = Variable::constant(Tensor({n, 1, th, tw}));
        } else {
            const Variable wt_sum = sum_pairs_column(r.interlayer, 1);
            t_att = bma_temporal_.forward(r.temporal_levels[3], r.temporal_levels[4], wt_sum, th, tw);
        }
        r.bi_att = bimodal_attention(s_att, t_att, sum_pairs_all(r.interlayer));
    }

    r.gated = gate_weights(r.interlayer, gate_threshold_);
    r.mix_levels = mix_.forward(r.spatial_levels, r.temporal_levels, r.gated);
    r.out = decoder_.forward(r.mix_levels, r.bi_att, out_h, out_w, &r.fup1);
    r.i_sal = side_spatial_.forward(r.spatial_levels[4], out_h, out_w);
    r.f_sal = side_temporal_.forward(r.temporal_levels[4], out_h, out_w);
    return r;
}

}  // namespace stdmmf
