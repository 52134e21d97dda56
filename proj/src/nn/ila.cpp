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

#include "nn/ila.hpp"

#include "core/error.hpp"

namespace stdmmf {

MultiKernelRefine::MultiKernelRefine(int in_channels, Rng& rng)
    : b0_(in_channels, kWidth, rng, 1),
      b1a_(in_channels, kWidth, rng, 1),
      b1b_(kWidth, kWidth, rng, 1, 3),
      b1c_(kWidth, kWidth, rng, 3, 1),
      b1d_(kWidth, kWidth, rng, 3),
      b2a_(in_channels, kWidth, rng, 1),
      b2b_(kWidth, kWidth, rng, 1, 5),
      b2c_(kWidth, kWidth, rng, 5, 1),
      b2d_(kWidth, kWidth, rng, 3),
      b3a_(in_channels, kWidth, rng, 1),
      b3b_(kWidth, kWidth, rng, 1, 7),
      b3c_(kWidth, kWidth, rng, 7, 1),
      b3d_(kWidth, kWidth, rng, 3),
      reduce_conv_(4 * kWidth, kWidth, 3, 3, rng, /*bias=*/false),
      reduce_bn_(kWidth) {
    add_child("b0", b0_);
    add_child("b1a", b1a_);
    add_child("b1b", b1b_);
    add_child("b1c", b1c_);
    add_child("b1d", b1d_);
    add_child("b2a", b2a_);
    add_child("b2b", b2b_);
    add_child("b2c", b2c_);
    add_child("b2d", b2d_);
    add_child("b3a", b3a_);
    add_child("b3b", b3b_);
    add_child("b3c", b3c_);
    add_child("b3d", b3d_);
    add_child("reduce_conv", reduce_conv_);
    add_child("reduce_bn", reduce_bn_);
}

Variable MultiKernelRefine::forward(const Variable& f) const {
    const Variable x0 = b0_.forward(f);
    const Variable x1 = b1d_.forward(b1c_.forward(b1b_.forward(b1a_.forward(f))));
    const Variable x2 = b2d_.forward(b2c_.forward(b2b_.forward(b2a_.forward(f))));
    const Variable x3 = b3d_.forward(b3c_.forward(b3b_.forward(b3a_.forward(f))));
    const Variable cat = concat_channels({x0, x1, x2, x3});
    return relu(add(reduce_bn_.forward(reduce_conv_.forward(cat)), x0));
}

IlaModule::IlaModule(int low_channels, int high_channels, Rng& rng)
    : refine_low_(low_channels, rng),
      refine_high_(high_channels, rng),
      conv_up_(MultiKernelRefine::kWidth, MultiKernelRefine::kWidth, 1, 1, rng),
      conv_skip_(MultiKernelRefine::kWidth, MultiKernelRefine::kWidth, 1, 1, rng),
      conv_head_(2 * MultiKernelRefine::kWidth, 1, 3, 3, rng) {
    add_child("refine_low", refine_low_);
    add_child("refine_high", refine_high_);
    add_child("conv_up", conv_up_);
    add_child("conv_skip", conv_skip_);
    add_child("conv_head", conv_head_);
}

Variable IlaModule::attention(const Variable& f_low, const Variable& f_high) const {
    const Tensor& lo = f_low.value();
    const Tensor& hi = f_high.value();
    if (hi.h() > lo.h() || hi.w() > lo.w())
        throw ShapeError("ila attention: high level " + hi.shape_str() + " is larger than low level " +
                         lo.shape_str());
    const Variable f_l = refine_low_.forward(f_low);
    const Variable f_h = refine_high_.forward(f_high);
    const Variable x_a = conv_up_.forward(upsample_bilinear(f_h, lo.h(), lo.w()));
    const Variable x_ap = mul(x_a, f_l);
    const Variable skip = conv_skip_.forward(x_a);
    return sigmoid(conv_head_.forward(concat_channels({x_ap, skip})));
}

Variable apply_attention(const Variable& x, const Variable& a) {
    return add(mul_channel_broadcast(x, a), x);
}

}  // namespace stdmmf
