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

#include <array>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace stdmmf {

/// The six saliency measures. Curve measures (F, Em) sweep the 256 uniform
/// binarization thresholds t_k = k/255 with the non-strict test pred >= t_k.
struct MetricReport {
    double mae = 0.0;
    double max_f = 0.0;
    double mean_f = 0.0;
    double max_em = 0.0;
    double mean_em = 0.0;
    double sm = 0.0;
};

/// Per-frame evaluation state kept for dataset-level aggregation: curves are
/// averaged across frames first, then reduced to max/mean.
struct FrameMetrics {
    double mae = 0.0;
    double sm = 0.0;
    std::array<double, 256> f_curve{};
    std::array<double, 256> em_curve{};
    double adaptive_f = 0.0;  // F at threshold min(2*mean(pred), 1)
    bool gt_empty = false;    // all-zero ground truth; F reported as 0 and flagged
};

/// Maps are 2-D tensors (H,W); pred in [0,1], gt binary {0,1}.
double mae(const Tensor& pred, const Tensor& gt);
std::pair<double, double> f_measure_curve(const Tensor& pred, const Tensor& gt);  // (max_f, mean_f)
std::pair<double, double> e_measure_curve(const Tensor& pred, const Tensor& gt);  // (max_em, mean_em)
double s_measure(const Tensor& pred, const Tensor& gt);

FrameMetrics evaluate_frame(const Tensor& pred, const Tensor& gt);

struct AggregateOptions {
    /// Replaces curve-mean mean-F with the per-frame adaptive-threshold
    /// variant averaged over frames.
    bool adaptive_mean_f = false;
};

/// Arithmetic mean of mae/sm; curve-first reduction for F and Em.
MetricReport aggregate(const std::vector<FrameMetrics>& frames, const AggregateOptions& opts = {});

int count_empty_gt(const std::vector<FrameMetrics>& frames);

/// Machine-readable key/value document, six decimal places, keys exactly
/// mae, max_f, mean_f, max_em, mean_em, sm.
std::string format_report_kv(const MetricReport& r);
std::string format_report_table(const MetricReport& r);

}  // namespace stdmmf
