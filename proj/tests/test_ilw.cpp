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
#include "nn/ilw.hpp"
#include "test_helpers.hpp"

using namespace stdmmf;
using test::random_tensor;

namespace {

constexpr std::array<int, 5> kChannels{8, 16, 32, 64, 64};

std::array<Variable, 5> tiny_levels(Rng& rng, double fill = std::nan("")) {
    const int sizes[5] = {8, 4, 2, 1, 1};
    std::array<Variable, 5> out;
    for (int i = 0; i < 5; ++i) {
        Tensor t = std::isnan(fill) ? random_tensor({1, kChannels[static_cast<size_t>(i)], sizes[i], sizes[i]}, rng)
                                    : Tensor({1, kChannels[static_cast<size_t>(i)], sizes[i], sizes[i]}, fill);
        out[static_cast<size_t>(i)] = Variable::constant(std::move(t));
    }
    return out;
}

}  // namespace

TEST_CASE("stream descriptor: five scalars, zero propagation, constant pooling") {
    Rng rng(301);
    StreamDescriptor desc(kChannels, rng);
    desc.set_training(false);
    NoGradGuard nograd;

    const Variable w = desc.forward(tiny_levels(rng));
    CHECK(w.value().shape() == std::vector<int>{1, 5});
    CHECK(w.value().min() >= 0.0);  // post-rectifier pooling

    const Variable wz = desc.forward(tiny_levels(rng, 0.0));
    for (int i = 0; i < 5; ++i) CHECK(wz.value()[i] == 0.0);
}

TEST_CASE("spatially constant fused maps pool to the per-channel constant") {
    Rng rng(302);
    StreamDescriptor desc(kChannels, rng);
    // Zero the fusion convolution and pin its normalization shift: the fused
    // map becomes the constant beta per channel, so pooling must return it.
    test::zero_params(desc);
    for (auto& [name, v] : desc.named_parameters()) {
        if (name == "fuse_bn.bias") {
            Tensor& t = const_cast<Variable&>(v).value();
            for (int i = 0; i < 5; ++i) t[i] = 0.25 * (i + 1);
        }
    }
    desc.set_training(false);
    NoGradGuard nograd;
    const Variable w = desc.forward(tiny_levels(rng));
    for (int i = 0; i < 5; ++i) CHECK(w.value()[i] == doctest::Approx(0.25 * (i + 1)).epsilon(1e-12));
}

TEST_CASE("interlayer weight table: symmetry, closed-form ratio, normalization") {
    SUBCASE("equal descriptors give uniform rows") {
        Tensor ws({1, 5}, {0.3, 1.0, -2.0, 7.5, 0.0});
        const Variable iw = interlayer_weight(Variable::constant(ws), Variable::constant(ws));
        for (int i = 0; i < 10; ++i) CHECK(iw.value()[i] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("a log-3 margin gives the 3:1 split") {
        Tensor ws({1, 5}), wt({1, 5});
        for (int i = 0; i < 5; ++i) {
            ws[i] = 0.2 * i + std::log(3.0);
            wt[i] = 0.2 * i;
        }
        const Variable iw = interlayer_weight(Variable::constant(ws), Variable::constant(wt));
        for (int i = 0; i < 5; ++i) {
            CHECK(iw.value()[2 * i] == doctest::Approx(0.75).epsilon(1e-12));
            CHECK(iw.value()[2 * i + 1] == doctest::Approx(0.25).epsilon(1e-12));
        }
    }
    SUBCASE("rows sum to one and the table sums to five") {
        Rng rng(303);
        for (int trial = 0; trial < 200; ++trial) {
            const Tensor ws = random_tensor({1, 5}, rng, -10.0, 10.0);
            const Tensor wt = random_tensor({1, 5}, rng, -10.0, 10.0);
            const Variable iw = interlayer_weight(Variable::constant(ws), Variable::constant(wt));
            double total = 0.0;
            for (int i = 0; i < 5; ++i) {
                const double row = iw.value()[2 * i] + iw.value()[2 * i + 1];
                CHECK(std::fabs(row - 1.0) <= 1e-9);
                CHECK(iw.value()[2 * i] > 0.0);
                CHECK(iw.value()[2 * i] < 1.0);
                total += row;
            }
            CHECK(std::fabs(total - 5.0) <= 1e-8);
        }
    }
    SUBCASE("shift invariance per level") {
        Rng rng(304);
        const Tensor ws = random_tensor({1, 5}, rng);
        const Tensor wt = random_tensor({1, 5}, rng);
        Tensor ws2 = ws, wt2 = wt;
        for (int i = 0; i < 5; ++i) {
            const double c = rng.uniform(-5.0, 5.0);
            ws2[i] += c;
            wt2[i] += c;
        }
        const Variable a = interlayer_weight(Variable::constant(ws), Variable::constant(wt));
        const Variable b = interlayer_weight(Variable::constant(ws2), Variable::constant(wt2));
        for (int i = 0; i < 10; ++i) CHECK(std::fabs(a.value()[i] - b.value()[i]) <= 1e-9);
    }
    SUBCASE("permuting both descriptors permutes the rows identically") {
        Rng rng(305);
        const Tensor ws = random_tensor({1, 5}, rng);
        const Tensor wt = random_tensor({1, 5}, rng);
        const int perm[5] = {3, 0, 4, 1, 2};
        Tensor wsp({1, 5}), wtp({1, 5});
        for (int i = 0; i < 5; ++i) {
            wsp[i] = ws[perm[i]];
            wtp[i] = wt[perm[i]];
        }
        const Variable a = interlayer_weight(Variable::constant(ws), Variable::constant(wt));
        const Variable b = interlayer_weight(Variable::constant(wsp), Variable::constant(wtp));
        for (int i = 0; i < 5; ++i) {
            CHECK(b.value()[2 * i] == a.value()[2 * perm[i]]);
            CHECK(b.value()[2 * i + 1] == a.value()[2 * perm[i] + 1]);
        }
    }
    SUBCASE("shape validation") {
        CHECK_THROWS_AS((void)interlayer_weight(Variable::constant(Tensor({1, 4})), Variable::constant(Tensor({1, 4}))),
                        ShapeError);
    }
}

TEST_CASE("descriptor gradients match finite differences") {
    Rng rng(306);
    StreamDescriptor desc(kChannels, rng);
    desc.set_training(false);
    Rng data_rng(307);
    const auto levels = tiny_levels(data_rng);
    const Tensor coef = random_tensor({1, 5}, data_rng);
    auto build_loss = [&]() { return mean_all(mul(desc.forward(levels), Variable::constant(coef))); };
    Rng pick(308);
    const auto res = test::fd_check_params(desc.named_parameters(), build_loss, 20, pick);
    CHECK(res.worst_rel_error < 1e-3);
}
