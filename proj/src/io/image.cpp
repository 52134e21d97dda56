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

#include "io/image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace stdmmf {

namespace {

cv::Mat imread_checked(const std::string& path, int flags) {
    cv::Mat img = cv::imread(path, flags);
    if (img.empty()) throw IoError("cannot read image: " + path);
    return img;
}

uint8_t quantize(double v) {
    const double c = std::clamp(v, 0.0, 1.0) * 255.0;
    return static_cast<uint8_t>(std::lround(c));  // lround = half away from zero
}

}  // namespace

Tensor load_image_rgb(const std::string& path) {
    cv::Mat img = imread_checked(path, cv::IMREAD_COLOR);  // BGR u8
    Tensor t({3, img.rows, img.cols});
    const int64_t plane = static_cast<int64_t>(img.rows) * img.cols;
    for (int y = 0; y < img.rows; ++y)
        for (int x = 0; x < img.cols; ++x) {
            const cv::Vec3b px = img.at<cv::Vec3b>(y, x);
            const int64_t i = static_cast<int64_t>(y) * img.cols + x;
            t[i] = px[2] / 255.0;              // R
            t[plane + i] = px[1] / 255.0;      // G
            t[2 * plane + i] = px[0] / 255.0;  // B
        }
    return t;
}

Tensor load_image_gray(const std::string& path) {
    cv::Mat img = imread_checked(path, cv::IMREAD_GRAYSCALE);
    Tensor t({img.rows, img.cols});
    for (int y = 0; y < img.rows; ++y)
        for (int x = 0; x < img.cols; ++x) t[static_cast<int64_t>(y) * img.cols + x] = img.at<uint8_t>(y, x) / 255.0;
    return t;
}

void save_image_gray(const std::string& path, const Tensor& map) {
    if (map.ndim() != 2) throw ShapeError("save_image_gray: expected a 2-D map, got " + map.shape_str());
    cv::Mat img(map.dim(0), map.dim(1), CV_8UC1);
    for (int y = 0; y < img.rows; ++y)
        for (int x = 0; x < img.cols; ++x)
            img.at<uint8_t>(y, x) = quantize(map[static_cast<int64_t>(y) * img.cols + x]);
    if (!cv::imwrite(path, img)) throw IoError("cannot write image: " + path);
}

void save_image_rgb(const std::string& path, const Tensor& chw) {
    if (chw.ndim() != 3 || chw.dim(0) != 3) throw ShapeError("save_image_rgb: expected (3,H,W), got " + chw.shape_str());
    const int h = chw.dim(1), w = chw.dim(2);
    const int64_t plane = static_cast<int64_t>(h) * w;
    cv::Mat img(h, w, CV_8UC3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int64_t i = static_cast<int64_t>(y) * w + x;
            img.at<cv::Vec3b>(y, x) = cv::Vec3b(quantize(chw[2 * plane + i]), quantize(chw[plane + i]), quantize(chw[i]));
        }
    if (!cv::imwrite(path, img)) throw IoError("cannot write image: " + path);
}

namespace {

Tensor resize_plane(const Tensor& map, int h, int w, int interp) {
    cv::Mat src(map.dim(0), map.dim(1), CV_64FC1, const_cast<double*>(map.data()));
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(w, h), 0, 0, interp);
    Tensor out({h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out[static_cast<int64_t>(y) * w + x] = dst.at<double>(y, x);
    return out;
}

}  // namespace

Tensor resize_rgb_bilinear(const Tensor& chw, int h, int w) {
    if (chw.ndim() != 3) throw ShapeError("resize_rgb_bilinear: expected (C,H,W), got " + chw.shape_str());
    const int c = chw.dim(0);
    Tensor out({c, h, w});
    const int64_t in_plane = static_cast<int64_t>(chw.dim(1)) * chw.dim(2);
    const int64_t out_plane = static_cast<int64_t>(h) * w;
    for (int ci = 0; ci < c; ++ci) {
        Tensor plane({chw.dim(1), chw.dim(2)},
                     std::vector<double>(chw.data() + ci * in_plane, chw.data() + (ci + 1) * in_plane));
        Tensor r = resize_plane(plane, h, w, cv::INTER_LINEAR);
        std::copy(r.data(), r.data() + out_plane, out.data() + ci * out_plane);
    }
    return out;
}

Tensor resize_map_bilinear(const Tensor& map, int h, int w) {
    if (map.ndim() != 2) throw ShapeError("resize_map_bilinear: expected (H,W), got " + map.shape_str());
    return resize_plane(map, h, w, cv::INTER_LINEAR);
}

Tensor resize_map_nearest(const Tensor& map, int h, int w) {
    if (map.ndim() != 2) throw ShapeError("resize_map_nearest: expected (H,W), got " + map.shape_str());
    return resize_plane(map, h, w, cv::INTER_NEAREST);
}

std::pair<int, int> png_size(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open: " + path);
    unsigned char hdr[24];
    const size_t got = std::fread(hdr, 1, sizeof(hdr), f);
    std::fclose(f);
    static const unsigned char magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (got == 24 && std::equal(magic, magic + 8, hdr)) {
        const auto be32 = [&](int off) {
            return (static_cast<int>(hdr[off]) << 24) | (hdr[off + 1] << 16) | (hdr[off + 2] << 8) | hdr[off + 3];
        };
        return {be32(20), be32(16)};  // (height, width)
    }
    // Not a PNG: fall back to a full decode.
    cv::Mat img = imread_checked(path, cv::IMREAD_UNCHANGED);
    return {img.rows, img.cols};
}

Tensor overlay_saliency(const Tensor& frame_rgb, const Tensor& map) {
    if (frame_rgb.ndim() != 3 || frame_rgb.dim(0) != 3 || map.ndim() != 2 || frame_rgb.dim(1) != map.dim(0) ||
        frame_rgb.dim(2) != map.dim(1))
        throw ShapeError("overlay_saliency: frame " + frame_rgb.shape_str() + " vs map " + map.shape_str());
    Tensor out = frame_rgb;
    const int64_t plane = map.numel();
    for (int64_t i = 0; i < plane; ++i) {
        const double a = 0.5 * std::clamp(map[i], 0.0, 1.0);
        out[i] = (1.0 - a) * out[i] + a;                          // toward red
        out[plane + i] = (1.0 - a) * out[plane + i];              // green fades
        out[2 * plane + i] = (1.0 - a) * out[2 * plane + i];      // blue fades
    }
    return out;
}

}  // namespace stdmmf
