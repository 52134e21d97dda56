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
#include <vector>

#include "core/autograd.hpp"

namespace stdmmf {

/// Stochastic gradient descent with momentum. Classic weight decay is added
/// to the gradient: v = mu*v + (g + wd*p); p -= lr*v.
class SgdOptimizer {
public:
    SgdOptimizer(std::vector<std::pair<std::string, Variable>> params, double lr, double momentum,
                 double weight_decay);

    void step();

    double learning_rate() const { return lr_; }

    struct Slot {
        std::string name;
        Variable param;
        Tensor velocity;
    };
    std::vector<Slot>& slots() { return slots_; }
    const std::vector<Slot>& slots() const { return slots_; }

private:
    std::vector<Slot> slots_;
    double lr_, momentum_, weight_decay_;
};

}  // namespace stdmmf
