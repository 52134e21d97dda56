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

#include "core/tensor.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace stdmmf {

int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        if (d < 0) throw ShapeError("negative tensor dimension in " + Tensor::shape_str(shape));
        n *= d;
    }
    return shape.empty() ? 0 : n;
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    numel_ = shape_numel(shape_);
    data_.assign(static_cast<size_t>(numel_), 0.0);
}

Tensor::Tensor(std::vector<int> shape, double fill) : shape_(std::move(shape)) {
    numel_ = shape_numel(shape_);
    data_.assign(static_cast<size_t>(numel_), fill);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    numel_ = shape_numel(shape_);
    if (numel_ != static_cast<int64_t>(data_.size()))
        throw ShapeError("tensor data size " + std::to_string(data_.size()) + " does not match shape " + shape_str());
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::add_(const Tensor& o) {
    if (!same_shape(o)) throw ShapeError("add_: shape mismatch " + shape_str() + " vs " + o.shape_str());
    const double* src = o.data();
    double* dst = data();
    for (int64_t i = 0; i < numel_; ++i) dst[i] += src[i];
}

void Tensor::scale_(double k) {
    for (auto& v : data_) v *= k;
}

double Tensor::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

double Tensor::min() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : data_) m = std::min(m, v);
    return m;
}

double Tensor::max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : data_) m = std::max(m, v);
    return m;
}

std::string Tensor::shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << ")";
    return os.str();
}

}  // namespace stdmmf
