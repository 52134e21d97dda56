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

#include "pipeline/infer.hpp"

#include <filesystem>

#include "core/error.hpp"
#include "core/ops.hpp"
#include "io/image.hpp"

namespace fs = std::filesystem;

namespace stdmmf {

namespace {

Tensor to_map(const Tensor& nchw) {
    // (1,1,H,W) -> (H,W)
    Tensor m({nchw.h(), nchw.w()});
    std::copy(nchw.data(), nchw.data() + nchw.numel(), m.data());
    return m;
}

}  // namespace

void run_inference(const DualStreamNet& model, const Dataset& data, const std::string& out_dir, bool overlay) {
    NoGradGuard nograd;
    fs::create_directories(out_dir);
    const int sz = data.input_size();
    for (size_t i = 0; i < data.size(); ++i) {
        const SampleRecord& rec = data.records()[i];
        LoadedSample s = data.load(i);
        Tensor frames({1, 3, sz, sz});
        Tensor flows({1, 3, sz, sz});
        std::copy(s.frame.data(), s.frame.data() + s.frame.numel(), frames.data());
        std::copy(s.flow.data(), s.flow.data() + s.flow.numel(), flows.data());
        const ForwardResult r = model.forward(Variable::constant(frames), Variable::constant(flows));
        const Variable full = upsample_bilinear(r.out, rec.orig_h, rec.orig_w);
        const Tensor map = to_map(full.value());

        const fs::path vdir = fs::path(out_dir) / rec.video_id;
        fs::create_directories(vdir);
        save_image_gray((vdir / (rec.stem + ".png")).string(), map);
        if (overlay) {
            const Tensor frame = load_image_rgb(rec.frame_path);
            save_image_rgb((vdir / (rec.stem + "_overlay.png")).string(), overlay_saliency(frame, map));
        }
    }
}

void export_overlays(const std::string& pred_dir, const std::string& frames_dir, const std::string& out_dir) {
    if (!fs::is_directory(pred_dir)) throw IoError("prediction directory does not exist: " + pred_dir);
    if (!fs::is_directory(frames_dir)) throw IoError("frames directory does not exist: " + frames_dir);
    size_t matched = 0;
    for (const auto& e : fs::recursive_directory_iterator(pred_dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".png") continue;
        if (e.path().stem().string().ends_with("_overlay")) continue;
        const fs::path rel = fs::relative(e.path(), pred_dir);
        // The frames tree may mirror the predictions or use the dataset
        // layout with a frames/ subdirectory per video.
        fs::path frame = fs::path(frames_dir) / rel;
        if (!fs::exists(frame))
            frame = fs::path(frames_dir) / rel.parent_path() / "frames" / rel.filename();
        if (!fs::exists(frame)) continue;
        const Tensor frame_rgb = load_image_rgb(frame.string());
        Tensor map = load_image_gray(e.path().string());
        if (map.dim(0) != frame_rgb.dim(1) || map.dim(1) != frame_rgb.dim(2))
            map = resize_map_bilinear(map, frame_rgb.dim(1), frame_rgb.dim(2));
        const fs::path out = fs::path(out_dir) / rel.parent_path() /
                             (rel.stem().string() + "_overlay.png");
        fs::create_directories(out.parent_path());
        save_image_rgb(out.string(), overlay_saliency(frame_rgb, map));
        ++matched;
    }
    if (matched == 0) throw IoError("no prediction/frame pairs found under " + pred_dir + " and " + frames_dir);
}

}  // namespace stdmmf
