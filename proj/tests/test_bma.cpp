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

#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "nn/bma.hpp"
#include "test_helpers.hpp"

using namespace stdmmf;
using test::random_tensor;

TEST_CASE("stream attention: shape, zero weight, exact homogeneity") {
    Rng rng(401);
    StreamAttention att(64, 64, rng);
    att.set_training(false);
    NoGradGuard nograd;
    const Tensor l4 = random_tensor({1, 64, 2, 2}, rng);
    const Tensor l5 = random_tensor({1, 64, 2, 2}, rng);

    const Variable out =
        att.forward(Variable::constant(l4), Variable::constant(l5), Variable::constant(Tensor({1}, 2.5)), 8, 8);
    CHECK(out.value().shape() == std::vector<int>{1, 1, 8, 8});

    const Variable zero =
        att.forward(Variable::constant(l4), Variable::constant(l5), Variable::constant(Tensor({1}, 0.0)), 8, 8);
    for (int64_t i = 0; i < zero.value().numel(); ++i) CHECK(zero.value()[i] == 0.0);

    // Doubling the weight doubles every element exactly (scaling by 2 is an
    // exact operation in binary floating point).
    const Variable twice =
        att.forward(Variable::constant(l4), Variable::constant(l5), Variable::constant(Tensor({1}, 5.0)), 8, 8);
    for (int64_t i = 0; i < out.value().numel(); ++i) CHECK(twice.value()[i] == 2.0 * out.value()[i]);
}

TEST_CASE("stream attention rejects targets smaller than level 4") {
    Rng rng(402);
    StreamAttention att(8, 8, rng);
    att.set_training(false);
    NoGradGuard nograd;
    CHECK_THROWS_AS((void)att.forward(Variable::constant(random_tensor({1, 8, 4, 4}, rng)),
                                      Variable::constant(random_tensor({1, 8, 4, 4}, rng)),
                                      Variable::constant(Tensor({1}, 1.0)), 2, 2),
                    ShapeError);
}

TEST_CASE("bimodal attention: fixed points, symmetry, range, guard") {
    Rng rng(403);
    const Tensor zero({1, 1, 4, 4});
    const Variable five = Variable::constant(Tensor({1}, 5.0));

    SUBCASE("zero maps give a uniform 0.5") {
        const Variable bi = bimodal_attention(Variable::constant(zero), Variable::constant(zero), five);
        for (int64_t i = 0; i < bi.value().numel(); ++i) CHECK(bi.value()[i] == 0.5);
    }
    SUBCASE("maps summing to the weight total give sigmoid(1)") {
        const Tensor a({1, 1, 4, 4}, 2.0);
        const Tensor b({1, 1, 4, 4}, 3.0);
        const Variable bi = bimodal_attention(Variable::constant(a), Variable::constant(b), five);
        const double expect = 1.0 / (1.0 + std::exp(-1.0));
        for (int64_t i = 0; i < bi.value().numel(); ++i) CHECK(bi.value()[i] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(expect == doctest::Approx(0.73106).epsilon(1e-4));
    }
    SUBCASE("swapping the stream maps changes nothing") {
        const Tensor a = random_tensor({1, 1, 4, 4}, rng, -3.0, 3.0);
        const Tensor b = random_tensor({1, 1, 4, 4}, rng, -3.0, 3.0);
        const Variable ab = bimodal_attention(Variable::constant(a), Variable::constant(b), five);
        const Variable ba = bimodal_attention(Variable::constant(b), Variable::constant(a), five);
        for (int64_t i = 0; i < ab.value().numel(); ++i) CHECK(ab.value()[i] == ba.value()[i]);
    }
    SUBCASE("values stay strictly inside (0,1)") {
        for (int trial = 0; trial < 100; ++trial) {
            const Variable bi = bimodal_attention(Variable::constant(random_tensor({1, 1, 3, 3}, rng, -50.0, 50.0)),
                                                  Variable::constant(random_tensor({1, 1, 3, 3}, rng, -50.0, 50.0)),
                                                  five);
            CHECK(bi.value().min() > 0.0);
            CHECK(bi.value().max() < 1.0);
        }
    }
    SUBCASE("nonpositive weight totals are rejected") {
        CHECK_THROWS_AS(
            (void)bimodal_attention(Variable::constant(zero), Variable::constant(zero), Variable::constant(Tensor({1}, 0.0))),
            DomainError);
        CHECK_THROWS_AS((void)bimodal_attention(Variable::constant(zero), Variable::constant(zero),
                                                Variable::constant(Tensor({1}, -1.0))),
                        DomainError);
    }
    SUBCASE("mismatched stream maps are rejected") {
        CHECK_THROWS_AS(
            (void)bimodal_attention(Variable::constant(zero), Variable::constant(Tensor({1, 1, 3, 3})), five),
            ShapeError);
    }
}

TEST_CASE("stream attention gradients match finite differences") {
    Rng rng(404);
    StreamAttention att(4, 4, rng);
    att.set_training(false);
    Rng data_rng(405);
    const Tensor l4 = random_tensor({1, 4, 2, 2}, data_rng);
    const Tensor l5 = random_tensor({1, 4, 2, 2}, data_rng);
    const Tensor coef = random_tensor({1, 1, 4, 4}, data_rng);
    auto build_loss = [&]() {
        const Variable s = att.forward(Variable::constant(l4), Variable::constant(l5),
                                       Variable::constant(Tensor({1}, 2.5)), 4, 4);
        const Variable bi = bimodal_attention(s, Variable::constant(Tensor({1, 1, 4, 4}, 0.3)),
                                              Variable::constant(Tensor({1}, 5.0)));
        return mean_all(mul(bi, Variable::constant(coef)));
    };
    Rng pick(406);
    const auto res = test::fd_check_params(att.named_parameters(), build_loss, 20, pick);
    CHECK(res.worst_rel_error < 1e-3);
}
