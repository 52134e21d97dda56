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

#include "pipeline/optimizer.hpp"

namespace stdmmf {

SgdOptimizer::SgdOptimizer(std::vector<std::pair<std::string, Variable>> params, double lr, double momentum,
                           double weight_decay)
    : lr_(lr), momentum_(momentum), weight_decay_(weight_decay) {
    slots_.reserve(params.size());
    for (auto& [name, v] : params) slots_.push_back({name, v, Tensor(v.value().shape())});
}

void SgdOptimizer::step() {
    for (auto& s : slots_) {
        Tensor& p = s.param.value();
        const Tensor& g = s.param.grad();
        const bool has_grad = g.defined();
        double* pv = p.data();
        double* vv = s.velocity.data();
        const int64_t n = p.numel();
        for (int64_t i = 0; i < n; ++i) {
            const double grad = (has_grad ? g[i] : 0.0) + weight_decay_ * pv[i];
            vv[i] = momentum_ * vv[i] + grad;
            pv[i] -= lr_ * vv[i];
        }
    }
}

}  // namespace stdmmf
