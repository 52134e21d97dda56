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
#include <vector>

#include "eval/metrics.hpp"

namespace stdmmf {

struct EvalResult {
    MetricReport report;
    int frames = 0;
    int empty_gt_frames = 0;                  // flagged all-zero ground truths
    std::vector<std::string> unmatched_pred;  // relative paths without a gt twin
    std::vector<std::string> unmatched_gt;
};

struct EvalOptions {
    AggregateOptions aggregate;
    int num_threads = 0;  // 0 = hardware default capped by STDMMF_NUM_THREADS
};

/// Pairs prediction and ground-truth PNGs by relative path, resizes
/// predictions to the gt size when needed (bilinear) and aggregates the six
/// metrics over the pairing. Frames evaluate in parallel; per-frame results
/// land in an index-ordered table so the reduction is order-independent.
/// Unmatched files are listed and evaluation proceeds on the intersection.
EvalResult evaluate_dirs(const std::string& pred_dir, const std::string& gt_dir, const EvalOptions& opts = {});

}  // namespace stdmmf
