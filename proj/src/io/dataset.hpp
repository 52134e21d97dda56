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

#include <optional>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace stdmmf {

enum class Split { train, val, test };

/// One (frame, flow, ground truth) triple. Pixel data is decoded lazily;
/// the record carries paths, the on-disk resolution and ordering keys.
struct SampleRecord {
    std::string video_id;
    std::string stem;  // file name without extension
    int frame_index = 0;
    std::string frame_path;
    std::string flow_path;
    std::string gt_path;  // empty when absent (test split)
    int orig_h = 0;
    int orig_w = 0;
};

/// Decoded sample: frame/flow are (3,S,S) standardized by the fixed
/// per-channel statistics; gt is (1,S,S) with values in {0,1}.
struct LoadedSample {
    Tensor frame;
    Tensor flow;
    Tensor gt;  // undefined when the record has no ground truth
};

/// Fixed normalization constants applied after scaling pixels to [0,1].
extern const double kChannelMean[3];
extern const double kChannelStd[3];

class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<SampleRecord> records, int input_size)
        : records_(std::move(records)), input_size_(input_size) {}

    const std::vector<SampleRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    int input_size() const { return input_size_; }

    LoadedSample load(size_t index) const;

private:
    std::vector<SampleRecord> records_;
    int input_size_ = 0;
};

/// Scans `root/<video_id>/{frames,flow,gt}/<name>.png`. A sample exists when
/// frame and flow share a stem (the first frame of a video usually has no
/// flow and is dropped with a warning). Ground truth is required for
/// train/val samples (missing ones are skipped with a warning) and optional
/// for test. Videos and frames are ordered by id and numeric stem.
Dataset load_dataset(const std::string& root, Split split, int input_size,
                     std::vector<std::string>* warnings = nullptr);

/// Standardizes an RGB tensor in [0,1] by the fixed channel statistics.
Tensor standardize_rgb(const Tensor& chw);

}  // namespace stdmmf
