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

#include "nn/bma.hpp"
#include "nn/encoders.hpp"
#include "nn/fusion.hpp"
#include "nn/ilw.hpp"
#include "nn/loss.hpp"

namespace stdmmf {

/// Runtime stream/module switches matching the ablation study modes.
/// disable_temporal zeroes the flow-side pyramid and pins the weight table to
/// (1,0) rows; it takes precedence over disable_ilw, whose uniform fallback
/// is (0.5,0.5) rows. disable_bma removes the attention product in the
/// decoder (equivalent to an all-ones map). disable_ila makes the spatial
/// stream the plain pyramid.
struct AblationFlags {
    bool disable_temporal = false;
    bool disable_ila = false;
    bool disable_ilw = false;
    bool disable_bma = false;
};

struct ForwardResult {
    Variable out;    // final saliency map, (N,1,H,W) in (0,1)
    Variable i_sal;  // spatial side output
    Variable f_sal;  // temporal side output
    std::array<Variable, 4> attentions;  // A1..A4; undefined when ILA is off
    Variable interlayer;                 // (N,5,2) softmax table (pre-gate)
    Variable gated;                      // (N,5,2) after the threshold gate
    Variable bi_att;                     // (N,1,h1,w1); undefined when BMA is off
    std::array<Variable, 5> spatial_levels;
    std::array<Variable, 5> temporal_levels;
    std::array<Variable, 5> mix_levels;  // decoder-width fused pyramid
    Variable fup1;                       // finest decoder feature, (N,64,h1,w1)
};

/// The complete dual-stream network: attention-injected spatial encoder,
/// plain temporal encoder over flow images (mirroring the spatial stream
/// including the pyramid-pooled fifth level, with its own parameters),
/// inter-layer weighting, bimodal attention, threshold-gated mixing and the
/// coarse-to-fine decoder with two supervised side outputs.
class DualStreamNet : public Module {
public:
    DualStreamNet(const BackboneConfig& cfg, uint64_t seed, AblationFlags flags = {}, double gate_threshold = 0.5);

    /// frames/flows: (N,3,H,W) with matching sizes, H and W divisible by 32.
    ForwardResult forward(const Variable& frames, const Variable& flows) const;

    const BackboneConfig& config() const { return cfg_; }
    const AblationFlags& flags() const { return flags_; }
    /// Flags alter wiring only; the parameter set is identical either way,
    /// so they may change between runs of the same trained model.
    void set_flags(const AblationFlags& flags) { flags_ = flags; }
    double gate_threshold() const { return gate_threshold_; }
    uint64_t seed() const { return seed_; }

    const SpatialStream& spatial_stream() const { return spatial_; }
    const Backbone& temporal_backbone() const { return temporal_; }

private:
    BackboneConfig cfg_;
    AblationFlags flags_;
    double gate_threshold_;
    uint64_t seed_;
    Rng init_rng_;  // drained during construction; fixed draw order = fixed init

    SpatialStream spatial_;
    Backbone temporal_;
    StreamDescriptor ilw_spatial_, ilw_temporal_;
    StreamAttention bma_spatial_, bma_temporal_;
    MixLevels mix_;
    Decoder decoder_;
    SideOutput side_spatial_, side_temporal_;
};

}  // namespace stdmmf
