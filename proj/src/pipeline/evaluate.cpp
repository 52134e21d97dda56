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

#include "pipeline/evaluate.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "io/image.hpp"

namespace fs = std::filesystem;

namespace stdmmf {

namespace {

std::set<std::string> relative_pngs(const std::string& root) {
    if (!fs::is_directory(root)) throw IoError("directory does not exist: " + root);
    std::set<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().extension() != ".png") continue;
        // Overlay visualizations written next to saliency maps are not
        // predictions.
        if (e.path().stem().string().ends_with("_overlay")) continue;
        out.insert(fs::relative(e.path(), root).generic_string());
    }
    return out;
}

}  // namespace

EvalResult evaluate_dirs(const std::string& pred_dir, const std::string& gt_dir, const EvalOptions& opts) {
    const std::set<std::string> preds = relative_pngs(pred_dir);
    const std::set<std::string> gts = relative_pngs(gt_dir);

    EvalResult result;
    std::vector<std::string> common;
    std::set_intersection(preds.begin(), preds.end(), gts.begin(), gts.end(), std::back_inserter(common));
    std::set_difference(preds.begin(), preds.end(), gts.begin(), gts.end(),
                        std::back_inserter(result.unmatched_pred));
    std::set_difference(gts.begin(), gts.end(), preds.begin(), preds.end(), std::back_inserter(result.unmatched_gt));
    if (common.empty()) throw DataError("no prediction/ground-truth pairs between " + pred_dir + " and " + gt_dir);

    std::vector<FrameMetrics> frames(common.size());
    parallel_for(static_cast<int64_t>(common.size()), worker_threads(opts.num_threads), [&](int64_t i) {
        const std::string& rel = common[static_cast<size_t>(i)];
        Tensor pred = load_image_gray((fs::path(pred_dir) / rel).string());
        Tensor gt_raw = load_image_gray((fs::path(gt_dir) / rel).string());
        if (!pred.same_shape(gt_raw)) pred = resize_map_bilinear(pred, gt_raw.dim(0), gt_raw.dim(1));
        Tensor gt(gt_raw.shape());
        for (int64_t j = 0; j < gt_raw.numel(); ++j) gt[j] = gt_raw[j] >= 0.5 ? 1.0 : 0.0;
        frames[static_cast<size_t>(i)] = evaluate_frame(pred, gt);
    });

    result.report = aggregate(frames, opts.aggregate);
    result.frames = static_cast<int>(frames.size());
    result.empty_gt_frames = count_empty_gt(frames);
    return result;
}

}  // namespace stdmmf
