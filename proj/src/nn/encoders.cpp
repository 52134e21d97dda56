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

#include "nn/encoders.hpp"

#include "core/error.hpp"

namespace stdmmf {

void BackboneConfig::validate() const {
    if (in_channels < 1) throw ConfigError("BackboneConfig.in_channels must be >= 1, got " + std::to_string(in_channels));
    for (size_t i = 0; i < 4; ++i) {
        if (width_schedule[i] < 1)
            throw ConfigError("BackboneConfig.width_schedule[" + std::to_string(i) + "] must be >= 1, got " +
                              std::to_string(width_schedule[i]));
        if (i > 0 && width_schedule[i] < width_schedule[i - 1])
            throw ConfigError("BackboneConfig.width_schedule must be nondecreasing at index " + std::to_string(i));
        if (block_counts[i] < 1)
            throw ConfigError("BackboneConfig.block_counts[" + std::to_string(i) + "] must be >= 1, got " +
                              std::to_string(block_counts[i]));
    }
    if (aspp_out_channels < 1)
        throw ConfigError("BackboneConfig.aspp_out_channels must be >= 1, got " + std::to_string(aspp_out_channels));
    if (input_size < 32 || input_size % 32 != 0)
        throw ConfigError("BackboneConfig.input_size must be a positive multiple of 32, got " +
                          std::to_string(input_size));
}

BackboneConfig BackboneConfig::resnet34(int input_size) {
    BackboneConfig cfg;
    cfg.input_size = input_size;
    return cfg;
}

BackboneConfig BackboneConfig::tiny(int input_size) {
    BackboneConfig cfg;
    cfg.width_schedule = {8, 16, 32, 64};
    cfg.block_counts = {1, 1, 1, 1};
    cfg.input_size = input_size;
    return cfg;
}

BasicBlock::BasicBlock(int in_channels, int out_channels, int stride, Rng& rng)
    : conv1_(in_channels, out_channels, 3, 3, rng, /*bias=*/false, stride),
      bn1_(out_channels),
      conv2_(out_channels, out_channels, 3, 3, rng, /*bias=*/false),
      bn2_(out_channels) {
    add_child("conv1", conv1_);
    add_child("bn1", bn1_);
    add_child("conv2", conv2_);
    add_child("bn2", bn2_);
    if (stride != 1 || in_channels != out_channels) {
        down_conv_ = std::make_unique<Conv2d>(in_channels, out_channels, 1, 1, rng, /*bias=*/false, stride, 0, 0);
        down_bn_ = std::make_unique<BatchNorm2d>(out_channels);
        add_child("downsample_conv", *down_conv_);
        add_child("downsample_bn", *down_bn_);
    }
}

Variable BasicBlock::forward(const Variable& x) const {
    Variable y = bn2_.forward(conv2_.forward(relu(bn1_.forward(conv1_.forward(x)))));
    Variable skip = down_conv_ ? down_bn_->forward(down_conv_->forward(x)) : x;
    return relu(add(y, skip));
}

ResidualLevel::ResidualLevel(int in_channels, int out_channels, int blocks, int stride, Rng& rng) {
    blocks_.reserve(static_cast<size_t>(blocks));
    for (int i = 0; i < blocks; ++i) {
        blocks_.push_back(std::make_unique<BasicBlock>(i == 0 ? in_channels : out_channels, out_channels,
                                                       i == 0 ? stride : 1, rng));
        add_child("block" + std::to_string(i), *blocks_.back());
    }
}

Variable ResidualLevel::forward(const Variable& x) const {
    Variable y = x;
    for (const auto& b : blocks_) y = b->forward(y);
    return y;
}

Aspp::Aspp(int in_channels, int out_channels, Rng& rng)
    : pool_conv_(in_channels, out_channels, 1, 1, rng),
      reduce_(5 * out_channels, out_channels, rng, 1) {
    if (out_channels < 1) throw ConfigError("aspp: out_channels must be >= 1, got " + std::to_string(out_channels));
    static constexpr int kRates[4] = {1, 6, 12, 18};
    for (int i = 0; i < 4; ++i) {
        branches_[static_cast<size_t>(i)] = std::make_unique<Conv2d>(in_channels, out_channels, 3, 3, rng,
                                                                     /*bias=*/true, 1, -1, -1, kRates[i]);
        add_child("branch" + std::to_string(i), *branches_[static_cast<size_t>(i)]);
    }
    add_child("pool_conv", pool_conv_);
    add_child("reduce", reduce_);
}

Variable Aspp::forward(const Variable& x) const {
    const int h = x.value().h(), w = x.value().w();
    std::vector<Variable> parts;
    parts.reserve(5);
    for (const auto& b : branches_) parts.push_back(b->forward(x));
    parts.push_back(broadcast_hw(pool_conv_.forward(global_avg_pool(x)), h, w));
    return reduce_.forward(concat_channels(parts));
}

Backbone::Backbone(const BackboneConfig& cfg, Rng& rng)
    : cfg_((cfg.validate(), cfg)),
      stem_conv_(cfg.in_channels, cfg.width_schedule[0], 7, 7, rng, /*bias=*/false, 2, 3, 3),
      stem_bn_(cfg.width_schedule[0]),
      aspp_(cfg.width_schedule[3], cfg.aspp_out_channels, rng) {
    add_child("stem_conv", stem_conv_);
    add_child("stem_bn", stem_bn_);
    const int stem_out = cfg.width_schedule[0];
    for (int i = 0; i < 4; ++i) {
        const int in_ch = i == 0 ? stem_out : cfg.width_schedule[static_cast<size_t>(i - 1)];
        const int stride = i == 0 ? 1 : 2;
        levels_[static_cast<size_t>(i)] = std::make_unique<ResidualLevel>(
            in_ch, cfg.width_schedule[static_cast<size_t>(i)], cfg.block_counts[static_cast<size_t>(i)], stride, rng);
        add_child("level" + std::to_string(i + 1), *levels_[static_cast<size_t>(i)]);
    }
    add_child("aspp", aspp_);
}

Variable Backbone::stem(const Variable& image) const {
    return max_pool2d(relu(stem_bn_.forward(stem_conv_.forward(image))), 3, 2, 1);
}

Variable Backbone::run_level(int level, const Variable& x) const {
    return levels_[static_cast<size_t>(level - 1)]->forward(x);
}

Variable Backbone::run_aspp(const Variable& f4) const { return aspp_.forward(f4); }

void Backbone::validate_input(const Tensor& img) const {
    if (img.ndim() != 4 || img.c() != cfg_.in_channels)
        throw ShapeError("extract_pyramid: expected (N," + std::to_string(cfg_.in_channels) + ",H,W), got " +
                         img.shape_str());
    if (img.h() % 32 != 0 || img.w() % 32 != 0)
        throw ShapeError("extract_pyramid: input height and width must be divisible by 32, got " + img.shape_str());
}

std::array<Variable, 5> Backbone::extract_pyramid(const Variable& image) const {
    validate_input(image.value());
    std::array<Variable, 5> f;
    Variable x = stem(image);
    for (int i = 0; i < 4; ++i) {
        x = levels_[static_cast<size_t>(i)]->forward(x);
        f[static_cast<size_t>(i)] = x;
    }
    f[4] = aspp_.forward(f[3]);
    return f;
}

SpatialStream::SpatialStream(const BackboneConfig& cfg, Rng& rng) : backbone_(cfg, rng) {
    add_child("backbone", backbone_);
    const auto ch = cfg.level_channels();
    for (int i = 0; i < 4; ++i) {
        ila_[static_cast<size_t>(i)] =
            std::make_unique<IlaModule>(ch[static_cast<size_t>(i)], ch[static_cast<size_t>(i + 1)], rng);
        add_child("ila" + std::to_string(i + 1), *ila_[static_cast<size_t>(i)]);
    }
}

std::array<Variable, 5> SpatialStream::forward_injected(const Variable& f1,
                                                        const std::array<Variable, 4>& attentions) const {
    std::array<Variable, 5> out;
    out[0] = apply_attention(f1, attentions[0]);
    Variable x = out[0];
    for (int i = 1; i < 4; ++i) {
        x = backbone_.run_level(i + 1, x);
        out[static_cast<size_t>(i)] = apply_attention(x, attentions[static_cast<size_t>(i)]);
        x = out[static_cast<size_t>(i)];
    }
    out[4] = backbone_.run_aspp(out[3]);
    return out;
}

SpatialStreamOut SpatialStream::forward(const Variable& frame, bool use_attention) const {
    SpatialStreamOut result;
    if (!use_attention) {
        result.levels = backbone_.extract_pyramid(frame);
        return result;
    }
    backbone_.validate_input(frame.value());
    // Levels 2..4 and the pyramid head run twice per step. Pass 1 normalizes
    // by batch statistics but leaves their running stats alone; pass 2 sees
    // the attention-modulated distribution the decoder consumes, so it owns
    // the updates. Singly-visited layers (stem, level 1, the attention
    // modules) update normally.
    std::array<Variable, 5> f;
    f[0] = backbone_.run_level(1, backbone_.stem(frame));
    {
        BnStatsFreezeGuard freeze;
        Variable x = f[0];
        for (int i = 2; i <= 4; ++i) {
            x = backbone_.run_level(i, x);
            f[static_cast<size_t>(i - 1)] = x;
        }
        f[4] = backbone_.run_aspp(f[3]);
    }
    for (int i = 0; i < 4; ++i)
        result.attentions[static_cast<size_t>(i)] =
            ila_[static_cast<size_t>(i)]->attention(f[static_cast<size_t>(i)], f[static_cast<size_t>(i + 1)]);
    result.levels = forward_injected(f[0], result.attentions);
    return result;
}

}  // namespace stdmmf
