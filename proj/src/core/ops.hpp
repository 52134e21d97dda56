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

#include <vector>

#include "core/autograd.hpp"
#include "core/tensor.hpp"

namespace stdmmf {

struct Conv2dSpec {
    int stride = 1;
    int pad_h = 0;
    int pad_w = 0;
    int dil_h = 1;
    int dil_w = 1;
};

/// 2-D convolution, x: (N,Cin,H,W), w: (Cout,Cin,kh,kw), optional bias (Cout).
Variable conv2d(const Variable& x, const Variable& w, const Variable& b, const Conv2dSpec& spec);

/// Batch normalization over (N,H,W) per channel. In training mode batch
/// statistics normalize and running stats are updated in place (momentum
/// convention: running = (1-m)*running + m*batch, unbiased batch variance);
/// in eval mode the running stats normalize. `update_running` can suppress
/// the stat update while keeping batch-stat normalization, for forward
/// passes that rerun the same layers on modulated inputs.
Variable batch_norm(const Variable& x, const Variable& gamma, const Variable& beta, Tensor& running_mean,
                    Tensor& running_var, bool training, double momentum = 0.1, double eps = 1e-5,
                    bool update_running = true);

Variable relu(const Variable& x);
Variable sigmoid(const Variable& x);

Variable max_pool2d(const Variable& x, int kernel, int stride, int pad);

/// (N,C,H,W) -> (N,C,1,1), mean over the spatial extent.
Variable global_avg_pool(const Variable& x);

/// (N,C,1,1) -> (N,C,h,w), value copied across the spatial extent.
Variable broadcast_hw(const Variable& x, int h, int w);

/// Bilinear resize with half-pixel (corner-aligned=false) source mapping:
/// src = max(0, (dst+0.5)*in/out - 0.5), low index floor(src) clamped to
/// in-1, blend weight = src - low. Exact identity when sizes match.
Variable upsample_bilinear(const Variable& x, int out_h, int out_w);

Variable concat_channels(const std::vector<Variable>& xs);

Variable add(const Variable& a, const Variable& b);
Variable mul(const Variable& a, const Variable& b);

/// x: (N,C,H,W) times a single-channel map a: (N,1,H,W) broadcast over C.
Variable mul_channel_broadcast(const Variable& x, const Variable& a);

/// Per-sample scalar scale / divide; s has shape (N).
Variable scale_rows(const Variable& x, const Variable& s);
Variable div_rows(const Variable& x, const Variable& s);

Variable scale(const Variable& x, double k);

/// Pairwise softmax: a,b of shape (N,K) -> (N,K,2) rows summing to 1.
Variable softmax_pairs(const Variable& a, const Variable& b);

/// Table ops for (N,K,2) weight tables.
Variable slice_pair(const Variable& table, int level, int col);      // -> (N)
Variable sum_pairs_column(const Variable& table, int col);           // -> (N)
Variable sum_pairs_all(const Variable& table);                       // -> (N)
Variable mul_mask(const Variable& x, const Tensor& mask);            // elementwise by constant

Variable reshape(const Variable& x, std::vector<int> shape);

Variable mean_all(const Variable& x);  // -> scalar (1)

/// Mean binary cross entropy of a probability map against a {0,1} (or soft
/// [0,1]) target; predictions are clamped to [eps, 1-eps] before the logs.
Variable bce_loss(const Variable& pred, const Tensor& target, double eps = 1e-7);

}  // namespace stdmmf
