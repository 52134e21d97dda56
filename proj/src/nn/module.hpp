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
#include <utility>
#include <vector>

#include "core/autograd.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace stdmmf {

/// Base for everything holding trainable state. Parameters are tape leaves
/// with requires_grad set; buffers (batch-norm running stats) are plain
/// tensors that serialize with the parameters but receive no gradient.
/// Registration order is construction order, which fixes parameter naming
/// and therefore the checkpoint manifest layout.
class Module {
public:
    Module() = default;
    virtual ~Module() = default;
    Module(const Module&) = delete;
    Module& operator=(const Module&) = delete;

    std::vector<std::pair<std::string, Variable>> named_parameters() const;
    std::vector<std::pair<std::string, Tensor*>> named_buffers() const;
    size_t parameter_count() const;

    void set_training(bool on);
    bool training() const { return training_; }

    void zero_grad();

protected:
    Variable add_parameter(const std::string& name, Tensor init);
    Tensor& add_buffer(const std::string& name, Tensor init);
    void add_child(const std::string& name, Module& child);

    virtual void on_mode_change() {}

private:
    void collect_parameters(const std::string& prefix,
                            std::vector<std::pair<std::string, Variable>>& out) const;
    void collect_buffers(const std::string& prefix, std::vector<std::pair<std::string, Tensor*>>& out) const;

    std::vector<std::pair<std::string, Variable>> params_;
    std::vector<std::pair<std::string, std::unique_ptr<Tensor>>> buffers_;
    std::vector<std::pair<std::string, Module*>> children_;
    bool training_ = true;
};

}  // namespace stdmmf
