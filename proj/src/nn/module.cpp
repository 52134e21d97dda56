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

#include "nn/module.hpp"

#include <memory>

namespace stdmmf {

Variable Module::add_parameter(const std::string& name, Tensor init) {
    Variable v = Variable::leaf(std::move(init), true);
    params_.emplace_back(name, v);
    return v;
}

Tensor& Module::add_buffer(const std::string& name, Tensor init) {
    buffers_.emplace_back(name, std::make_unique<Tensor>(std::move(init)));
    return *buffers_.back().second;
}

void Module::add_child(const std::string& name, Module& child) { children_.emplace_back(name, &child); }

void Module::collect_parameters(const std::string& prefix,
                                std::vector<std::pair<std::string, Variable>>& out) const {
    for (const auto& [name, v] : params_) out.emplace_back(prefix + name, v);
    for (const auto& [name, child] : children_) child->collect_parameters(prefix + name + ".", out);
}

void Module::collect_buffers(const std::string& prefix, std::vector<std::pair<std::string, Tensor*>>& out) const {
    for (const auto& [name, t] : buffers_) out.emplace_back(prefix + name, t.get());
    for (const auto& [name, child] : children_) child->collect_buffers(prefix + name + ".", out);
}

std::vector<std::pair<std::string, Variable>> Module::named_parameters() const {
    std::vector<std::pair<std::string, Variable>> out;
    collect_parameters("", out);
    return out;
}

std::vector<std::pair<std::string, Tensor*>> Module::named_buffers() const {
    std::vector<std::pair<std::string, Tensor*>> out;
    collect_buffers("", out);
    return out;
}

size_t Module::parameter_count() const {
    size_t total = 0;
    for (const auto& [name, v] : named_parameters()) total += static_cast<size_t>(v.value().numel());
    return total;
}

void Module::set_training(bool on) {
    training_ = on;
    on_mode_change();
    for (auto& [name, child] : children_) child->set_training(on);
}

void Module::zero_grad() {
    for (auto& [name, v] : named_parameters()) v.zero_grad();
}

}  // namespace stdmmf
