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

#include "io/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>

#include "core/error.hpp"
#include "io/image.hpp"

namespace fs = std::filesystem;

namespace stdmmf {

const double kChannelMean[3] = {0.485, 0.456, 0.406};
const double kChannelStd[3] = {0.229, 0.224, 0.225};

namespace {

bool numeric_stem(const std::string& s, int& value) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    value = std::stoi(s);
    return true;
}

std::map<std::string, std::string> scan_pngs(const fs::path& dir) {
    std::map<std::string, std::string> out;  // stem -> path
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const fs::path p = e.path();
        if (p.extension() != ".png") continue;
        out[p.stem().string()] = p.string();
    }
    return out;
}

}  // namespace

Tensor standardize_rgb(const Tensor& chw) {
    if (chw.ndim() != 3 || chw.dim(0) != 3) throw ShapeError("standardize_rgb: expected (3,H,W)");
    Tensor out = chw;
    const int64_t plane = static_cast<int64_t>(chw.dim(1)) * chw.dim(2);
    for (int c = 0; c < 3; ++c) {
        double* p = out.data() + c * plane;
        for (int64_t i = 0; i < plane; ++i) p[i] = (p[i] - kChannelMean[c]) / kChannelStd[c];
    }
    return out;
}

LoadedSample Dataset::load(size_t index) const {
    const SampleRecord& rec = records_.at(index);
    LoadedSample s;
    const int sz = input_size_;
    s.frame = standardize_rgb(resize_rgb_bilinear(load_image_rgb(rec.frame_path), sz, sz));
    s.flow = standardize_rgb(resize_rgb_bilinear(load_image_rgb(rec.flow_path), sz, sz));
    if (!rec.gt_path.empty()) {
        Tensor g = resize_map_nearest(load_image_gray(rec.gt_path), sz, sz);
        Tensor gt({1, sz, sz});
        for (int64_t i = 0; i < g.numel(); ++i) gt[i] = g[i] >= 0.5 ? 1.0 : 0.0;
        s.gt = std::move(gt);
    }
    return s;
}

Dataset load_dataset(const std::string& root, Split split, int input_size, std::vector<std::string>* warnings) {
    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };
    if (!fs::is_directory(root)) throw IoError("dataset root does not exist: " + root);

    std::vector<std::string> videos;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) videos.push_back(e.path().filename().string());
    std::sort(videos.begin(), videos.end());
    if (videos.empty()) warn("dataset root contains no video directories: " + root);

    const bool need_gt = split != Split::test;
    std::vector<SampleRecord> records;
    for (const std::string& vid : videos) {
        const fs::path vdir = fs::path(root) / vid;
        const fs::path frames_dir = vdir / "frames";
        if (!fs::is_directory(frames_dir)) throw IoError("missing frames directory: " + frames_dir.string());
        const auto frames = scan_pngs(frames_dir);
        const auto flows = scan_pngs(vdir / "flow");
        const auto gts = scan_pngs(vdir / "gt");

        std::vector<SampleRecord> video_records;
        for (const auto& [stem, fpath] : frames) {
            const auto flow_it = flows.find(stem);
            if (flow_it == flows.end()) {
                warn("video " + vid + ": frame " + stem + " has no flow counterpart, skipped");
                continue;
            }
            SampleRecord rec;
            rec.video_id = vid;
            rec.stem = stem;
            if (!numeric_stem(stem, rec.frame_index)) rec.frame_index = -1;
            rec.frame_path = fpath;
            rec.flow_path = flow_it->second;
            const auto gt_it = gts.find(stem);
            if (gt_it != gts.end()) {
                rec.gt_path = gt_it->second;
                const auto [fh, fw] = png_size(rec.frame_path);
                const auto [gh, gw] = png_size(rec.gt_path);
                if (fh != gh || fw != gw)
                    throw DataError("video " + vid + " frame " + stem + ": frame is " + std::to_string(fw) + "x" +
                                    std::to_string(fh) + " but ground truth is " + std::to_string(gw) + "x" +
                                    std::to_string(gh));
                rec.orig_h = fh;
                rec.orig_w = fw;
            } else {
                if (need_gt) {
                    warn("video " + vid + ": frame " + stem + " has no ground truth, skipped");
                    continue;
                }
                const auto [fh, fw] = png_size(rec.frame_path);
                rec.orig_h = fh;
                rec.orig_w = fw;
            }
            video_records.push_back(std::move(rec));
        }
        std::sort(video_records.begin(), video_records.end(), [](const SampleRecord& a, const SampleRecord& b) {
            if (a.frame_index >= 0 && b.frame_index >= 0 && a.frame_index != b.frame_index)
                return a.frame_index < b.frame_index;
            return a.stem < b.stem;
        });
        records.insert(records.end(), std::make_move_iterator(video_records.begin()),
                       std::make_move_iterator(video_records.end()));
    }
    if (records.empty()) warn("dataset is empty after pairing: " + root);
    return Dataset(std::move(records), input_size);
}

}  // namespace stdmmf
