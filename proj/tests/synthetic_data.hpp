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

// Synthetic fixtures: a bright disk drifting over a dark background, the
// matching color-coded displaced-disk flow image, and the disk mask as
// ground truth.

#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "core/rng.hpp"
#include "core/tensor.hpp"
#include "io/image.hpp"

namespace stdmmf::test {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("stdmmf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline Tensor disk_frame(int size, double cx, double cy, double radius) {
    Tensor img({3, size, size});
    const int64_t plane = static_cast<int64_t>(size) * size;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const bool inside = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
            const int64_t i = static_cast<int64_t>(y) * size + x;
            img[i] = inside ? 0.95 : 0.08;
            img[plane + i] = inside ? 0.85 : 0.10;
            img[2 * plane + i] = inside ? 0.25 : 0.12;
        }
    return img;
}

inline Tensor disk_flow(int size, double cx, double cy, double radius) {
    // Rightward motion painted as a warm hue inside the displaced disk.
    Tensor img({3, size, size});
    const int64_t plane = static_cast<int64_t>(size) * size;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const bool inside = (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius;
            const int64_t i = static_cast<int64_t>(y) * size + x;
            img[i] = inside ? 0.9 : 0.5;
            img[plane + i] = inside ? 0.45 : 0.5;
            img[2 * plane + i] = 0.5;
        }
    return img;
}

inline Tensor disk_mask(int size, double cx, double cy, double radius) {
    Tensor m({size, size});
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            m[static_cast<int64_t>(y) * size + x] =
                (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius ? 1.0 : 0.0;
    return m;
}

/// Writes n_frames of a drifting disk under root/<video_id>/{frames,flow,gt}.
inline void write_synthetic_video(const std::filesystem::path& root, const std::string& video_id, int n_frames,
                                  int size, uint64_t seed = 0) {
    namespace fs = std::filesystem;
    Rng rng(seed);
    const double radius = size * 0.22 + rng.uniform(-1.0, 1.0);
    double cx = size * rng.uniform(0.35, 0.65);
    double cy = size * rng.uniform(0.35, 0.65);
    const double step = size * 0.03;
    fs::create_directories(root / video_id / "frames");
    fs::create_directories(root / video_id / "flow");
    fs::create_directories(root / video_id / "gt");
    for (int i = 0; i < n_frames; ++i) {
        char stem[16];
        std::snprintf(stem, sizeof(stem), "%05d", i);
        save_image_rgb((root / video_id / "frames" / (std::string(stem) + ".png")).string(),
                       disk_frame(size, cx, cy, radius));
        save_image_rgb((root / video_id / "flow" / (std::string(stem) + ".png")).string(),
                       disk_flow(size, cx + step, cy, radius));
        Tensor gt = disk_mask(size, cx, cy, radius);
        gt.scale_(1.0);  // values already {0,1}; stored as {0,255}
        save_image_gray((root / video_id / "gt" / (std::string(stem) + ".png")).string(), gt);
        cx += step;
    }
}

}  // namespace stdmmf::test
