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

#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace stdmmf {

namespace {

constexpr double kBetaSq = 0.3;  // F-measure beta^2, the SOD convention
constexpr double kEps = 1e-8;

void check_pair(const Tensor& pred, const Tensor& gt) {
    if (pred.ndim() != 2 || gt.ndim() != 2)
        throw ShapeError("metrics: maps must be 2-D, got " + pred.shape_str() + " and " + gt.shape_str());
    if (!pred.same_shape(gt))
        throw ShapeError("metrics: shape mismatch " + pred.shape_str() + " vs " + gt.shape_str());
}

/// Largest threshold index k with t_k = k/255 <= p, using the same double
/// comparisons a per-threshold sweep would make.
int top_threshold_index(double p) {
    int k = static_cast<int>(p * 255.0);
    k = std::clamp(k, 0, 255);
    while (k < 255 && static_cast<double>(k + 1) / 255.0 <= p) ++k;
    while (k > 0 && static_cast<double>(k) / 255.0 > p) --k;
    return k;
}

struct ThresholdCounts {
    // tp[k] / fp[k]: positives predicted at threshold k among gt 1 / gt 0.
    std::array<int64_t, 256> tp{}, fp{};
    int64_t gt_pos = 0;
    int64_t total = 0;
};

ThresholdCounts threshold_counts(const Tensor& pred, const Tensor& gt) {
    ThresholdCounts c;
    std::array<int64_t, 256> hist_pos{}, hist_neg{};
    const int64_t n = pred.numel();
    c.total = n;
    for (int64_t i = 0; i < n; ++i) {
        const int k = top_threshold_index(pred[i]);
        if (gt[i] > 0.5) {
            ++hist_pos[static_cast<size_t>(k)];
            ++c.gt_pos;
        } else {
            ++hist_neg[static_cast<size_t>(k)];
        }
    }
    int64_t tp = 0, fp = 0;
    for (int k = 255; k >= 0; --k) {
        tp += hist_pos[static_cast<size_t>(k)];
        fp += hist_neg[static_cast<size_t>(k)];
        c.tp[static_cast<size_t>(k)] = tp;
        c.fp[static_cast<size_t>(k)] = fp;
    }
    return c;
}

double f_score(int64_t tp, int64_t fp, int64_t gt_pos) {
    const int64_t pred_pos = tp + fp;
    const double precision = pred_pos > 0 ? static_cast<double>(tp) / static_cast<double>(pred_pos) : 0.0;
    const double recall = gt_pos > 0 ? static_cast<double>(tp) / static_cast<double>(gt_pos) : 0.0;
    const double denom = kBetaSq * precision + recall;
    return denom > 0.0 ? (1.0 + kBetaSq) * precision * recall / denom : 0.0;
}

std::array<double, 256> f_curve_from_counts(const ThresholdCounts& c) {
    std::array<double, 256> curve{};
    if (c.gt_pos == 0) return curve;  // all-zero gt: F reported as 0, flagged upstream
    for (int k = 0; k < 256; ++k)
        curve[static_cast<size_t>(k)] = f_score(c.tp[static_cast<size_t>(k)], c.fp[static_cast<size_t>(k)], c.gt_pos);
    return curve;
}

/// Enhanced alignment at one threshold from the four (gt,bin) class counts.
double em_from_counts(int64_t tp, int64_t fp, int64_t gt_pos, int64_t total) {
    const int64_t pred_pos = tp + fp;
    if (gt_pos == total) {  // gt all ones
        if (pred_pos == total) return 1.0;
        if (pred_pos == 0) return 0.0;
    } else if (gt_pos == 0) {  // gt all zeros
        if (pred_pos == 0) return 1.0;
        if (pred_pos == total) return 0.0;
    }
    const double mu_g = static_cast<double>(gt_pos) / static_cast<double>(total);
    const double mu_b = static_cast<double>(pred_pos) / static_cast<double>(total);
    const int64_t fn = gt_pos - tp;
    const int64_t tn = total - tp - fp - fn;
    auto enhanced = [&](double g, double b) {
        const double dg = g - mu_g, db = b - mu_b;
        const double phi = 2.0 * dg * db / (dg * dg + db * db + kEps);
        const double a = 1.0 + phi;
        return a * a / 4.0;
    };
    double acc = 0.0;
    acc += static_cast<double>(tp) * enhanced(1.0, 1.0);
    acc += static_cast<double>(fn) * enhanced(1.0, 0.0);
    acc += static_cast<double>(fp) * enhanced(0.0, 1.0);
    acc += static_cast<double>(tn) * enhanced(0.0, 0.0);
    return acc / static_cast<double>(total);
}

std::array<double, 256> em_curve_from_counts(const ThresholdCounts& c) {
    std::array<double, 256> curve{};
    for (int k = 0; k < 256; ++k)
        curve[static_cast<size_t>(k)] =
            em_from_counts(c.tp[static_cast<size_t>(k)], c.fp[static_cast<size_t>(k)], c.gt_pos, c.total);
    return curve;
}

double region_mean(const Tensor& values, const Tensor& mask, bool inside, int64_t count) {
    if (count == 0) return 0.0;
    double s = 0.0;
    for (int64_t i = 0; i < values.numel(); ++i)
        if ((mask[i] > 0.5) == inside) s += values[i];
    return s / static_cast<double>(count);
}

double region_std(const Tensor& values, const Tensor& mask, bool inside, int64_t count, double mean) {
    if (count <= 1) return 0.0;
    double ss = 0.0;
    for (int64_t i = 0; i < values.numel(); ++i)
        if ((mask[i] > 0.5) == inside) {
            const double d = values[i] - mean;
            ss += d * d;
        }
    return std::sqrt(ss / static_cast<double>(count - 1));
}

double object_score(double mean, double stddev) { return 2.0 * mean / (mean * mean + 1.0 + 2.0 * stddev + kEps); }

/// SSIM variant used by the region term: sample moments, and the original
/// zero-cases (score 1 when both numerator and denominator vanish).
double block_ssim(const Tensor& pred, const Tensor& gt, int y0, int y1, int x0, int x1) {
    const int h = pred.dim(0), w = pred.dim(1);
    (void)h;
    const int64_t nb = static_cast<int64_t>(y1 - y0) * (x1 - x0);
    if (nb <= 0) return 0.0;
    double mx = 0.0, my = 0.0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            mx += pred[static_cast<int64_t>(y) * w + x];
            my += gt[static_cast<int64_t>(y) * w + x];
        }
    mx /= static_cast<double>(nb);
    my /= static_cast<double>(nb);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            const double dx = pred[static_cast<int64_t>(y) * w + x] - mx;
            const double dy = gt[static_cast<int64_t>(y) * w + x] - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    const double denom_n = nb > 1 ? static_cast<double>(nb - 1) : 1.0;
    sxx /= denom_n;
    syy /= denom_n;
    sxy /= denom_n;
    const double alpha = 4.0 * mx * my * sxy;
    const double beta = (mx * mx + my * my) * (sxx + syy);
    if (alpha != 0.0) return alpha / (beta + kEps);
    return beta == 0.0 ? 1.0 : 0.0;
}

}  // namespace

double mae(const Tensor& pred, const Tensor& gt) {
    check_pair(pred, gt);
    double s = 0.0;
    for (int64_t i = 0; i < pred.numel(); ++i) s += std::fabs(pred[i] - gt[i]);
    return s / static_cast<double>(pred.numel());
}

std::pair<double, double> f_measure_curve(const Tensor& pred, const Tensor& gt) {
    check_pair(pred, gt);
    const ThresholdCounts c = threshold_counts(pred, gt);
    const auto curve = f_curve_from_counts(c);
    double mx = 0.0, mean = 0.0;
    for (double v : curve) {
        mx = std::max(mx, v);
        mean += v;
    }
    return {mx, mean / 256.0};
}

std::pair<double, double> e_measure_curve(const Tensor& pred, const Tensor& gt) {
    check_pair(pred, gt);
    const ThresholdCounts c = threshold_counts(pred, gt);
    const auto curve = em_curve_from_counts(c);
    double mx = 0.0, mean = 0.0;
    for (double v : curve) {
        mx = std::max(mx, v);
        mean += v;
    }
    return {mx, mean / 256.0};
}

double s_measure(const Tensor& pred, const Tensor& gt) {
    check_pair(pred, gt);
    const int h = pred.dim(0), w = pred.dim(1);
    const int64_t total = pred.numel();
    int64_t fg = 0;
    for (int64_t i = 0; i < total; ++i)
        if (gt[i] > 0.5) ++fg;
    const double y = static_cast<double>(fg) / static_cast<double>(total);
    if (fg == 0) return std::clamp(1.0 - pred.mean(), 0.0, 1.0);
    if (fg == total) return std::clamp(pred.mean(), 0.0, 1.0);

    // Object term: foreground compares pred inside gt, background compares
    // 1-pred outside gt.
    const double mean_fg = region_mean(pred, gt, true, fg);
    const double std_fg = region_std(pred, gt, true, fg, mean_fg);
    Tensor inv(pred.shape());
    for (int64_t i = 0; i < total; ++i) inv[i] = 1.0 - pred[i];
    const double mean_bg = region_mean(inv, gt, false, total - fg);
    const double std_bg = region_std(inv, gt, false, total - fg, mean_bg);
    const double s_object = y * object_score(mean_fg, std_fg) + (1.0 - y) * object_score(mean_bg, std_bg);

    // Region term: split both maps into four blocks at the gt centroid and
    // average the per-block SSIM scores weighted by block area. The split is
    // placed at the block boundary nearest to the real-valued centroid,
    // which keeps the division mirror-symmetric under flips (up to exact
    // centroid ties).
    double sum_x = 0.0, sum_y = 0.0;
    for (int yy = 0; yy < h; ++yy)
        for (int xx = 0; xx < w; ++xx)
            if (gt[static_cast<int64_t>(yy) * w + xx] > 0.5) {
                sum_y += yy;
                sum_x += xx;
            }
    const int ysplit = std::clamp(static_cast<int>(std::lround(sum_y / static_cast<double>(fg) + 0.5)), 1, h - 1);
    const int xsplit = std::clamp(static_cast<int>(std::lround(sum_x / static_cast<double>(fg) + 0.5)), 1, w - 1);
    const double area = static_cast<double>(total);
    const double w1 = static_cast<double>(ysplit) * xsplit / area;
    const double w2 = static_cast<double>(ysplit) * (w - xsplit) / area;
    const double w3 = static_cast<double>(h - ysplit) * xsplit / area;
    const double w4 = 1.0 - w1 - w2 - w3;
    const double s_region = w1 * block_ssim(pred, gt, 0, ysplit, 0, xsplit) +
                            w2 * block_ssim(pred, gt, 0, ysplit, xsplit, w) +
                            w3 * block_ssim(pred, gt, ysplit, h, 0, xsplit) +
                            w4 * block_ssim(pred, gt, ysplit, h, xsplit, w);

    return std::clamp(0.5 * s_object + 0.5 * s_region, 0.0, 1.0);
}

FrameMetrics evaluate_frame(const Tensor& pred, const Tensor& gt) {
    check_pair(pred, gt);
    FrameMetrics fm;
    fm.mae = mae(pred, gt);
    fm.sm = s_measure(pred, gt);
    const ThresholdCounts c = threshold_counts(pred, gt);
    fm.gt_empty = c.gt_pos == 0;
    fm.f_curve = f_curve_from_counts(c);
    fm.em_curve = em_curve_from_counts(c);

    // Adaptive-threshold F: binarize at min(2*mean(pred), 1).
    const double at = std::min(2.0 * pred.mean(), 1.0);
    int64_t tp = 0, fp = 0;
    for (int64_t i = 0; i < pred.numel(); ++i) {
        if (pred[i] >= at) {
            if (gt[i] > 0.5)
                ++tp;
            else
                ++fp;
        }
    }
    fm.adaptive_f = c.gt_pos == 0 ? 0.0 : f_score(tp, fp, c.gt_pos);
    return fm;
}

MetricReport aggregate(const std::vector<FrameMetrics>& frames, const AggregateOptions& opts) {
    if (frames.empty()) throw DomainError("aggregate: need at least one frame");
    const double n = static_cast<double>(frames.size());
    MetricReport r;
    std::array<double, 256> f_avg{}, em_avg{};
    double adaptive = 0.0;
    for (const auto& fm : frames) {
        r.mae += fm.mae;
        r.sm += fm.sm;
        adaptive += fm.adaptive_f;
        for (int k = 0; k < 256; ++k) {
            f_avg[static_cast<size_t>(k)] += fm.f_curve[static_cast<size_t>(k)];
            em_avg[static_cast<size_t>(k)] += fm.em_curve[static_cast<size_t>(k)];
        }
    }
    r.mae /= n;
    r.sm /= n;
    adaptive /= n;
    double f_max = 0.0, f_mean = 0.0, em_max = 0.0, em_mean = 0.0;
    for (int k = 0; k < 256; ++k) {
        const double f = f_avg[static_cast<size_t>(k)] / n;
        const double e = em_avg[static_cast<size_t>(k)] / n;
        f_max = std::max(f_max, f);
        f_mean += f;
        em_max = std::max(em_max, e);
        em_mean += e;
    }
    r.max_f = f_max;
    r.mean_f = opts.adaptive_mean_f ? adaptive : f_mean / 256.0;
    r.max_em = em_max;
    r.mean_em = em_mean / 256.0;
    return r;
}

int count_empty_gt(const std::vector<FrameMetrics>& frames) {
    int c = 0;
    for (const auto& fm : frames)
        if (fm.gt_empty) ++c;
    return c;
}

std::string format_report_kv(const MetricReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "mae = %.6f\nmax_f = %.6f\nmean_f = %.6f\nmax_em = %.6f\nmean_em = %.6f\nsm = %.6f\n", r.mae,
                  r.max_f, r.mean_f, r.max_em, r.mean_em, r.sm);
    return buf;
}

std::string format_report_table(const MetricReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "  metric   |   value\n"
                  "  ---------+---------\n"
                  "  MAE      | %8.6f\n"
                  "  max-F    | %8.6f\n"
                  "  mean-F   | %8.6f\n"
                  "  max-Em   | %8.6f\n"
                  "  mean-Em  | %8.6f\n"
                  "  Sm       | %8.6f\n",
                  r.mae, r.max_f, r.mean_f, r.max_em, r.mean_em, r.sm);
    return buf;
}

}  // namespace stdmmf
