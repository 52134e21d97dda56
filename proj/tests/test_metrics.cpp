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
#include "eval/metrics.hpp"
#include "metric_oracles.hpp"
#include "test_helpers.hpp"

using namespace stdmmf;
namespace oracle = stdmmf::test::oracle;
using test::random_tensor;

namespace {

Tensor random_pred(int h, int w, Rng& rng) { return random_tensor({h, w}, rng, 0.0, 1.0); }

Tensor random_mask(int h, int w, Rng& rng, double density = 0.5) {
    Tensor t({h, w});
    for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng.uniform() < density ? 1.0 : 0.0;
    return t;
}

Tensor hflip(const Tensor& m) {
    Tensor out(m.shape());
    const int h = m.dim(0), w = m.dim(1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out[static_cast<int64_t>(y) * w + x] = m[static_cast<int64_t>(y) * w + (w - 1 - x)];
    return out;
}

bool centroid_tied(const Tensor& gt) {
    const int h = gt.dim(0), w = gt.dim(1);
    double sx = 0, sy = 0, n = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (gt[static_cast<int64_t>(y) * w + x] > 0.5) {
                sx += x;
                sy += y;
                n += 1;
            }
    if (n == 0 || n == gt.numel()) return false;
    const double mx = sx / n, my = sy / n;
    return std::fabs(mx - std::round(mx)) < 1e-9 || std::fabs(my - std::round(my)) < 1e-9;
}

}  // namespace

TEST_CASE("mae: identity, constant distance, loop oracle") {
    Rng rng(101);
    Tensor gt = random_mask(8, 8, rng);
    CHECK(mae(gt, gt) == 0.0);
    Tensor half({8, 8}, 0.5);
    CHECK(mae(half, gt) == doctest::Approx(0.5).epsilon(1e-15));
    for (int i = 0; i < 20; ++i) {
        Tensor p = random_pred(8, 8, rng);
        Tensor g = random_mask(8, 8, rng);
        CHECK(std::fabs(mae(p, g) - oracle::mae(p, g)) < 1e-12);
    }
    // Maximal-error complement: mae(1-gt, gt) = 1 for binary gt.
    Tensor inv(gt.shape());
    for (int64_t i = 0; i < gt.numel(); ++i) inv[i] = 1.0 - gt[i];
    CHECK(mae(inv, gt) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)mae(Tensor({4, 4}), Tensor({5, 4})), ShapeError);
}

TEST_CASE("f-measure: perfect prediction, constant prediction, oracle match") {
    Rng rng(103);
    Tensor gt = random_mask(8, 8, rng, 0.4);
    auto [maxf_eq, meanf_eq] = f_measure_curve(gt, gt);
    CHECK(maxf_eq == doctest::Approx(1.0).epsilon(1e-12));

    // pred == 1 with gt density rho: every threshold gives P=rho, R=1.
    Tensor ones({8, 8}, 1.0);
    Tensor quarter({8, 8});
    for (int i = 0; i < 16; ++i) quarter[i * 4] = 1.0;  // rho = 0.25
    const double expect = 1.3 * 0.25 / (0.3 * 0.25 + 1.0);
    auto [maxf, meanf] = f_measure_curve(ones, quarter);
    CHECK(maxf == doctest::Approx(expect).epsilon(1e-12));
    CHECK(meanf == doctest::Approx(expect).epsilon(1e-12));

    for (int i = 0; i < 50; ++i) {
        Tensor p = random_pred(8, 8, rng);
        Tensor g = random_mask(8, 8, rng);
        const auto curve = oracle::f_curve(p, g);
        double omax = 0, omean = 0;
        for (double v : curve) {
            omax = std::max(omax, v);
            omean += v;
        }
        omean /= 256.0;
        auto [mx, mn] = f_measure_curve(p, g);
        CHECK(std::fabs(mx - omax) < 1e-9);
        CHECK(std::fabs(mn - omean) < 1e-9);
    }
}

TEST_CASE("f-measure oracle counters are monotone in the threshold") {
    Rng rng(107);
    Tensor p = random_pred(8, 8, rng);
    Tensor g = random_mask(8, 8, rng);
    long prev_tp = 65, prev_fp = 65;
    for (int k = 0; k < 256; ++k) {
        const auto c = oracle::count_at_threshold(p, g, k / 255.0);
        CHECK(c.tp <= prev_tp);
        CHECK(c.fp <= prev_fp);
        prev_tp = c.tp;
        prev_fp = c.fp;
    }
}

TEST_CASE("e-measure: matched maps, inverted maps, oracle match, degenerate rules") {
    Rng rng(109);
    Tensor gt = random_mask(8, 8, rng, 0.5);
    auto [max_em, mean_em] = e_measure_curve(gt, gt);
    CHECK(max_em == doctest::Approx(1.0).epsilon(1e-6));

    Tensor inv(gt.shape());
    for (int64_t i = 0; i < gt.numel(); ++i) inv[i] = 1.0 - gt[i];
    // At the threshold where the binarized prediction equals 1-gt the
    // alignment is -1 everywhere, so that curve point is ~0.
    const auto curve = oracle::em_curve(inv, gt);
    double omin = 1.0;
    for (double v : curve) omin = std::min(omin, v);
    CHECK(omin < 1e-12);

    for (int i = 0; i < 50; ++i) {
        Tensor p = random_pred(8, 8, rng);
        Tensor g = random_mask(8, 8, rng);
        const auto oc = oracle::em_curve(p, g);
        double omax = 0, omean = 0;
        for (double v : oc) {
            omax = std::max(omax, v);
            omean += v;
        }
        omean /= 256.0;
        auto [mx, mn] = e_measure_curve(p, g);
        CHECK(std::fabs(mx - omax) < 1e-9);
        CHECK(std::fabs(mn - omean) < 1e-9);
    }

    // Degenerate conventions: both constant equal -> 1; opposite -> 0.
    Tensor zeros({4, 4}), onesT({4, 4}, 1.0);
    auto [mx0, mn0] = e_measure_curve(zeros, zeros);
    CHECK(mx0 == doctest::Approx(1.0));   // B all zeros at high thresholds
    auto [mx1, mn1] = e_measure_curve(onesT, onesT);
    CHECK(mx1 == doctest::Approx(1.0));
    auto [mx2, mn2] = e_measure_curve(onesT, zeros);  // B all ones vs G all zeros
    CHECK(mx2 == doctest::Approx(0.0));
    CHECK(mn2 == doctest::Approx(0.0));
}

TEST_CASE("s-measure: identity, degenerate gt, oracle equivalence") {
    Rng rng(113);
    Tensor gt = random_mask(16, 16, rng, 0.3);
    CHECK(s_measure(gt, gt) == doctest::Approx(1.0).epsilon(1e-6));

    Tensor pred3({16, 16}, 0.3);
    Tensor zeros({16, 16});
    CHECK(s_measure(pred3, zeros) == doctest::Approx(0.7).epsilon(1e-12));
    Tensor ones({16, 16}, 1.0);
    CHECK(s_measure(pred3, ones) == doctest::Approx(0.3).epsilon(1e-12));

    for (int i = 0; i < 50; ++i) {
        Tensor p = random_pred(16, 16, rng);
        Tensor g = random_mask(16, 16, rng, rng.uniform(0.1, 0.9));
        CHECK(std::fabs(s_measure(p, g) - oracle::s_measure(p, g)) < 1e-6);
    }
}

TEST_CASE("all six metrics are invariant to simultaneous horizontal flips") {
    Rng rng(127);
    int done = 0;
    while (done < 25) {
        Tensor p = random_pred(9, 12, rng);
        Tensor g = random_mask(9, 12, rng, rng.uniform(0.2, 0.8));
        if (centroid_tied(g)) continue;  // split ambiguity at exact ties
        Tensor pf = hflip(p), gf = hflip(g);
        CHECK(std::fabs(mae(p, g) - mae(pf, gf)) < 1e-12);
        auto [f1, f2] = f_measure_curve(p, g);
        auto [f1f, f2f] = f_measure_curve(pf, gf);
        CHECK(std::fabs(f1 - f1f) < 1e-12);
        CHECK(std::fabs(f2 - f2f) < 1e-12);
        auto [e1, e2] = e_measure_curve(p, g);
        auto [e1f, e2f] = e_measure_curve(pf, gf);
        CHECK(std::fabs(e1 - e1f) < 1e-12);
        CHECK(std::fabs(e2 - e2f) < 1e-12);
        CHECK(std::fabs(s_measure(p, g) - s_measure(pf, gf)) < 1e-6);
        ++done;
    }
}

TEST_CASE("aggregate: single frame, duplicates, two-frame curve average") {
    Rng rng(131);
    Tensor p1 = random_pred(8, 8, rng), g1 = random_mask(8, 8, rng);
    Tensor p2 = random_pred(8, 8, rng), g2 = random_mask(8, 8, rng);
    const FrameMetrics f1 = evaluate_frame(p1, g1);
    const FrameMetrics f2 = evaluate_frame(p2, g2);

    const MetricReport single = aggregate({f1});
    CHECK(single.mae == doctest::Approx(f1.mae).epsilon(1e-15));
    auto [mx1, mn1] = f_measure_curve(p1, g1);
    CHECK(single.max_f == doctest::Approx(mx1).epsilon(1e-15));
    CHECK(single.mean_f == doctest::Approx(mn1).epsilon(1e-15));

    const MetricReport dup = aggregate({f1, f1});
    CHECK(dup.max_f == doctest::Approx(single.max_f).epsilon(1e-15));
    CHECK(dup.sm == doctest::Approx(single.sm).epsilon(1e-15));

    // Curve-first convention checked against explicit oracle averaging.
    const auto c1 = oracle::f_curve(p1, g1);
    const auto c2 = oracle::f_curve(p2, g2);
    double omax = 0.0;
    for (int k = 0; k < 256; ++k) omax = std::max(omax, (c1[static_cast<size_t>(k)] + c2[static_cast<size_t>(k)]) / 2.0);
    const MetricReport both = aggregate({f1, f2});
    CHECK(both.max_f == doctest::Approx(omax).epsilon(1e-9));

    CHECK_THROWS_AS((void)aggregate({}), DomainError);
}

TEST_CASE("empty-gt frames are flagged and scored F=0") {
    Rng rng(137);
    Tensor p = random_pred(8, 8, rng);
    Tensor zero_gt({8, 8});
    const FrameMetrics fm = evaluate_frame(p, zero_gt);
    CHECK(fm.gt_empty);
    for (double v : fm.f_curve) CHECK(v == 0.0);
    CHECK(count_empty_gt({fm, evaluate_frame(p, random_mask(8, 8, rng))}) == 1);
}

TEST_CASE("report documents: key/value fields and six decimals") {
    MetricReport r{0.0323, 0.7444, 0.7153, 0.9083, 0.8773, 0.8179};
    const std::string kv = format_report_kv(r);
    CHECK(kv == "mae = 0.032300\nmax_f = 0.744400\nmean_f = 0.715300\nmax_em = 0.908300\nmean_em = 0.877300\nsm = "
                "0.817900\n");
    CHECK(format_report_table(r).find("0.744400") != std::string::npos);
}

TEST_CASE("adaptive mean-F variant is available behind the aggregate option") {
    Rng rng(139);
    Tensor p = random_pred(8, 8, rng);
    Tensor g = random_mask(8, 8, rng);
    const FrameMetrics fm = evaluate_frame(p, g);
    AggregateOptions opts;
    opts.adaptive_mean_f = true;
    const MetricReport r = aggregate({fm}, opts);
    CHECK(r.mean_f == doctest::Approx(fm.adaptive_f).epsilon(1e-15));
    // Oracle: binarize at min(2*mean(pred), 1).
    const double at = std::min(2.0 * p.mean(), 1.0);
    const auto c = oracle::count_at_threshold(p, g, at);
    const double prec = (c.tp + c.fp) ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double rec = (c.tp + c.fn) ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    const double denom = 0.3 * prec + rec;
    CHECK(fm.adaptive_f == doctest::Approx(denom > 0 ? 1.3 * prec * rec / denom : 0.0).epsilon(1e-12));
}
