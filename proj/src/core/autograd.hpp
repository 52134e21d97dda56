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

#include <functional>
#include <memory>
#include <vector>

#include "core/tensor.hpp"

namespace stdmmf {

struct VarNode;
using VarNodePtr = std::shared_ptr<VarNode>;

/// One node of the reverse-mode tape. `backward` consumes the node's own
/// accumulated gradient and adds the corresponding contributions into each
/// parent's gradient buffer.
struct VarNode {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    uint64_t seq = 0;
    std::vector<VarNodePtr> parents;
    std::function<void(const Tensor& grad_out)> backward;

    void accumulate(const Tensor& g);
    void ensure_grad();
};

/// Handle to a tape node. Copies share the node.
class Variable {
public:
    Variable() = default;

    static Variable leaf(Tensor value, bool requires_grad = false);
    static Variable constant(Tensor value) { return leaf(std::move(value), false); }

    /// Builds an op node. When gradients are globally disabled or no parent
    /// requires them, the result is a detached leaf and `fn` is dropped, so
    /// inference never retains the graph.
    static Variable make_op(Tensor value, std::vector<Variable> parents,
                            std::function<void(const Tensor&)> fn);

    bool defined() const { return node_ != nullptr; }
    const Tensor& value() const { return node_->value; }
    Tensor& value() { return node_->value; }
    const Tensor& grad() const { return node_->grad; }
    bool requires_grad() const { return node_ && node_->requires_grad; }
    void zero_grad();
    VarNodePtr node() const { return node_; }

    const std::vector<int>& shape() const { return node_->value.shape(); }

private:
    explicit Variable(VarNodePtr n) : node_(std::move(n)) {}
    VarNodePtr node_;
};

/// Runs reverse-mode accumulation from a scalar root (numel == 1).
void backward(const Variable& root);

/// Tape recording switch, thread local. Construct a NoGradGuard around
/// inference-only code to avoid building the graph.
bool grad_enabled();
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

}  // namespace stdmmf
