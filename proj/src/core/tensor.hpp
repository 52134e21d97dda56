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

#include <cstdint>
#include <string>
#include <vector>

namespace stdmmf {

/// Dense row-major tensor of doubles. Activations use NCHW order; parameter
/// tensors use whatever rank fits (conv weights are OIHW, biases are 1-D).
/// Value semantics: copies are deep.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);
    Tensor(std::vector<int> shape, double fill);
    Tensor(std::vector<int> shape, std::vector<double> data);

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<int> shape, double v) { return Tensor(std::move(shape), v); }
    static Tensor scalar(double v) { return Tensor({1}, v); }

    bool defined() const { return !shape_.empty(); }
    const std::vector<int>& shape() const { return shape_; }
    int ndim() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    int64_t numel() const { return numel_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    // NCHW accessors; valid only for 4-D tensors.
    int n() const { return shape_[0]; }
    int c() const { return shape_[1]; }
    int h() const { return shape_[2]; }
    int w() const { return shape_[3]; }
    double& at(int n, int c, int h, int w) {
        return data_[static_cast<size_t>(((int64_t(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
    }
    double at(int n, int c, int h, int w) const {
        return data_[static_cast<size_t>(((int64_t(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w)];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(double v);
    void zero() { fill(0.0); }

    /// Elementwise accumulate; shapes must match.
    void add_(const Tensor& o);
    void scale_(double k);

    double sum() const;
    double min() const;
    double max() const;
    double mean() const { return numel_ ? sum() / static_cast<double>(numel_) : 0.0; }

    static std::string shape_str(const std::vector<int>& shape);
    std::string shape_str() const { return shape_str(shape_); }

private:
    std::vector<int> shape_;
    std::vector<double> data_;
    int64_t numel_ = 0;
};

int64_t shape_numel(const std::vector<int>& shape);

}  // namespace stdmmf
