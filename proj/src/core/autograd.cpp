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

#include "core/autograd.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

#include "core/error.hpp"

namespace stdmmf {

namespace {
std::atomic<uint64_t> g_seq{1};
thread_local bool g_grad_enabled = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

void VarNode::ensure_grad() {
    if (!grad.defined()) grad = Tensor(value.shape());
}

void VarNode::accumulate(const Tensor& g) {
    if (!requires_grad) return;
    ensure_grad();
    grad.add_(g);
}

Variable Variable::leaf(Tensor value, bool requires_grad) {
    auto n = std::make_shared<VarNode>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    n->seq = g_seq.fetch_add(1);
    return Variable(std::move(n));
}

Variable Variable::make_op(Tensor value, std::vector<Variable> parents,
                           std::function<void(const Tensor&)> fn) {
    bool need = false;
    if (g_grad_enabled) {
        for (const auto& p : parents)
            if (p.defined() && p.requires_grad()) {
                need = true;
                break;
            }
    }
    if (!need) return leaf(std::move(value), false);

    auto n = std::make_shared<VarNode>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->seq = g_seq.fetch_add(1);
    n->parents.reserve(parents.size());
    for (auto& p : parents)
        if (p.defined()) n->parents.push_back(p.node());
    n->backward = std::move(fn);
    return Variable(std::move(n));
}

void Variable::zero_grad() {
    if (node_ && node_->grad.defined()) node_->grad.zero();
}

void backward(const Variable& root) {
    if (!root.defined()) throw Error("backward: undefined variable");
    if (root.value().numel() != 1) throw Error("backward: root must be scalar, got " + root.value().shape_str());
    if (!root.requires_grad()) return;

    // Topological collection; seq stamps increase in construction order, so a
    // descending sort is a valid reverse-topological order.
    std::vector<VarNode*> order;
    std::unordered_set<VarNode*> seen;
    std::vector<VarNode*> stack{root.node().get()};
    seen.insert(root.node().get());
    while (!stack.empty()) {
        VarNode* n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (const auto& p : n->parents) {
            if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
        }
    }
    std::sort(order.begin(), order.end(), [](const VarNode* a, const VarNode* b) { return a->seq > b->seq; });

    root.node()->ensure_grad();
    root.node()->grad.add_(Tensor({1}, 1.0));
    for (VarNode* n : order) {
        if (n->backward && n->grad.defined()) n->backward(n->grad);
    }
}

}  // namespace stdmmf
