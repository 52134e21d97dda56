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

#include "core/ops.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace stdmmf {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatCM = Eigen::MatrixXd;

void require(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}

int conv_out_dim(int in, int k, int stride, int pad, int dil) {
    const int eff = dil * (k - 1) + 1;
    return (in + 2 * pad - eff) / stride + 1;
}

// Column buffer layout: column-major (K, OH*OW) with K = Cin*kh*kw, so the
// K entries of one output position are contiguous.
void im2col(const Tensor& x, int n, int kh, int kw, const Conv2dSpec& sp, int oh, int ow, double* col) {
    const int cin = x.c(), h = x.h(), w = x.w();
    const int k_total = cin * kh * kw;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            double* dst = col + (static_cast<int64_t>(oy) * ow + ox) * k_total;
            const int iy0 = oy * sp.stride - sp.pad_h;
            const int ix0 = ox * sp.stride - sp.pad_w;
            int k = 0;
            for (int ci = 0; ci < cin; ++ci) {
                const double* plane = x.data() + ((static_cast<int64_t>(n) * cin + ci) * h) * w;
                for (int ky = 0; ky < kh; ++ky) {
                    const int iy = iy0 + ky * sp.dil_h;
                    if (iy < 0 || iy >= h) {
                        for (int kx = 0; kx < kw; ++kx) dst[k++] = 0.0;
                        continue;
                    }
                    const double* row = plane + static_cast<int64_t>(iy) * w;
                    for (int kx = 0; kx < kw; ++kx) {
                        const int ix = ix0 + kx * sp.dil_w;
                        dst[k++] = (ix < 0 || ix >= w) ? 0.0 : row[ix];
                    }
                }
            }
        }
    }
}

void col2im_add(const double* col, int cin, int h, int w, int kh, int kw, const Conv2dSpec& sp, int oh, int ow,
                double* dx) {
    const int k_total = cin * kh * kw;
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const double* src = col + (static_cast<int64_t>(oy) * ow + ox) * k_total;
            const int iy0 = oy * sp.stride - sp.pad_h;
            const int ix0 = ox * sp.stride - sp.pad_w;
            int k = 0;
            for (int ci = 0; ci < cin; ++ci) {
                double* plane = dx + (static_cast<int64_t>(ci) * h) * w;
                for (int ky = 0; ky < kh; ++ky) {
                    const int iy = iy0 + ky * sp.dil_h;
                    if (iy < 0 || iy >= h) {
                        k += kw;
                        continue;
                    }
                    double* row = plane + static_cast<int64_t>(iy) * w;
                    for (int kx = 0; kx < kw; ++kx, ++k) {
                        const int ix = ix0 + kx * sp.dil_w;
                        if (ix >= 0 && ix < w) row[ix] += src[k];
                    }
                }
            }
        }
    }
}

struct BilinearIndex {
    int lo, hi;
    double frac;
};

BilinearIndex bilinear_index(int dst, int in_size, int out_size) {
    if (in_size == out_size) return {dst, dst, 0.0};
    double src = (static_cast<double>(dst) + 0.5) * (static_cast<double>(in_size) / out_size) - 0.5;
    if (src < 0.0) src = 0.0;
    int lo = static_cast<int>(src);
    if (lo > in_size - 1) lo = in_size - 1;
    const int hi = std::min(lo + 1, in_size - 1);
    return {lo, hi, src - lo};
}

}  // namespace

Variable conv2d(const Variable& x, const Variable& w, const Variable& b, const Conv2dSpec& spec) {
    const Tensor& xv = x.value();
    const Tensor& wv = w.value();
    require(xv.ndim() == 4, "conv2d: input must be 4-D, got " + xv.shape_str());
    require(wv.ndim() == 4, "conv2d: weight must be 4-D, got " + wv.shape_str());
    require(xv.c() == wv.dim(1),
            "conv2d: input channels " + std::to_string(xv.c()) + " != weight channels " + std::to_string(wv.dim(1)));
    const int n = xv.n(), cout = wv.dim(0), kh = wv.dim(2), kw = wv.dim(3);
    const int oh = conv_out_dim(xv.h(), kh, spec.stride, spec.pad_h, spec.dil_h);
    const int ow = conv_out_dim(xv.w(), kw, spec.stride, spec.pad_w, spec.dil_w);
    require(oh >= 1 && ow >= 1, "conv2d: output would be empty for input " + xv.shape_str());
    if (b.defined()) require(b.value().numel() == cout, "conv2d: bias size mismatch");

    const int k_total = xv.c() * kh * kw;
    const int64_t cols = static_cast<int64_t>(oh) * ow;
    Tensor out({n, cout, oh, ow});
    std::vector<double> colbuf(static_cast<size_t>(k_total) * cols);
    Eigen::Map<const MatRM> wmat(wv.data(), cout, k_total);
    for (int i = 0; i < n; ++i) {
        im2col(xv, i, kh, kw, spec, oh, ow, colbuf.data());
        Eigen::Map<const MatCM> colmat(colbuf.data(), k_total, cols);
        Eigen::Map<MatCM> outmat(out.data() + static_cast<int64_t>(i) * cout * cols, cols, cout);
        // outmat is (cols, cout) column-major == (cout, cols) row-major.
        outmat.noalias() = colmat.transpose() * wmat.transpose();
    }
    if (b.defined()) {
        const double* bias = b.value().data();
        double* o = out.data();
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < cout; ++c) {
                const double bv = bias[c];
                for (int64_t j = 0; j < cols; ++j) *o++ += bv;
            }
    }

    auto xn = x.node();
    auto wn = w.node();
    auto bn = b.defined() ? b.node() : nullptr;
    Conv2dSpec sp = spec;
    const int in_h = xv.h(), in_w = xv.w(), cin = xv.c();
    return Variable::make_op(
        std::move(out), {x, w, b},
        [xn, wn, bn, sp, n, cout, kh, kw, oh, ow, in_h, in_w, cin, k_total, cols](const Tensor& g) {
            Eigen::Map<const MatRM> wmat(wn->value.data(), cout, k_total);
            const bool need_x = xn->requires_grad;
            const bool need_w = wn->requires_grad;
            if (need_x) xn->ensure_grad();
            if (need_w) wn->ensure_grad();
            std::vector<double> colbuf(static_cast<size_t>(k_total) * cols);
            std::vector<double> colgrad(need_x ? static_cast<size_t>(k_total) * cols : 0);
            for (int i = 0; i < n; ++i) {
                Eigen::Map<const MatCM> gmat(g.data() + static_cast<int64_t>(i) * cout * cols, cols, cout);
                if (need_w) {
                    im2col(xn->value, i, kh, kw, sp, oh, ow, colbuf.data());
                    Eigen::Map<const MatCM> colmat(colbuf.data(), k_total, cols);
                    Eigen::Map<MatRM> gw(wn->grad.data(), cout, k_total);
                    gw.noalias() += gmat.transpose() * colmat.transpose();
                }
                if (need_x) {
                    Eigen::Map<MatCM> cg(colgrad.data(), k_total, cols);
                    cg.noalias() = wmat.transpose() * gmat.transpose();
                    col2im_add(colgrad.data(), cin, in_h, in_w, kh, kw, sp, oh, ow,
                               xn->grad.data() + static_cast<int64_t>(i) * cin * in_h * in_w);
                }
            }
            if (bn && bn->requires_grad) {
                bn->ensure_grad();
                double* gb = bn->grad.data();
                const double* gd = g.data();
                for (int i = 0; i < n; ++i)
                    for (int c = 0; c < cout; ++c) {
                        double s = 0.0;
                        for (int64_t j = 0; j < cols; ++j) s += *gd++;
                        gb[c] += s;
                    }
            }
        });
}

Variable batch_norm(const Variable& x, const Variable& gamma, const Variable& beta, Tensor& running_mean,
                    Tensor& running_var, bool training, double momentum, double eps, bool update_running) {
    const Tensor& xv = x.value();
    require(xv.ndim() == 4, "batch_norm: input must be 4-D");
    const int n = xv.n(), c = xv.c(), h = xv.h(), w = xv.w();
    require(gamma.value().numel() == c && beta.value().numel() == c, "batch_norm: parameter size mismatch");
    require(running_mean.numel() == c && running_var.numel() == c, "batch_norm: running stat size mismatch");
    const int64_t m = static_cast<int64_t>(n) * h * w;
    const int64_t plane = static_cast<int64_t>(h) * w;

    Tensor mean({c}), invstd({c});
    if (training) {
        for (int ci = 0; ci < c; ++ci) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const double* p = xv.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                for (int64_t j = 0; j < plane; ++j) s += p[j];
            }
            const double mu = s / static_cast<double>(m);
            double ss = 0.0;
            for (int i = 0; i < n; ++i) {
                const double* p = xv.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                for (int64_t j = 0; j < plane; ++j) {
                    const double d = p[j] - mu;
                    ss += d * d;
                }
            }
            const double var = ss / static_cast<double>(m);
            mean[ci] = mu;
            invstd[ci] = 1.0 / std::sqrt(var + eps);
            if (update_running) {
                const double var_unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1) : var;
                running_mean[ci] = (1.0 - momentum) * running_mean[ci] + momentum * mu;
                running_var[ci] = (1.0 - momentum) * running_var[ci] + momentum * var_unbiased;
            }
        }
    } else {
        for (int ci = 0; ci < c; ++ci) {
            mean[ci] = running_mean[ci];
            invstd[ci] = 1.0 / std::sqrt(running_var[ci] + eps);
        }
    }

    Tensor out(xv.shape());
    const double* gm = gamma.value().data();
    const double* bt = beta.value().data();
    for (int i = 0; i < n; ++i)
        for (int ci = 0; ci < c; ++ci) {
            const double* p = xv.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
            double* o = out.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
            const double mu = mean[ci], is = invstd[ci], ga = gm[ci], be = bt[ci];
            for (int64_t j = 0; j < plane; ++j) o[j] = (p[j] - mu) * is * ga + be;
        }

    auto xn = x.node();
    auto gn = gamma.node();
    auto bn = beta.node();
    return Variable::make_op(
        std::move(out), {x, gamma, beta},
        [xn, gn, bn, mean, invstd, training, n, c, plane, m](const Tensor& g) {
            // dgamma = sum g*xhat, dbeta = sum g; training mode adds the
            // batch-statistic terms to dx.
            std::vector<double> dgamma(static_cast<size_t>(c), 0.0), dbeta(static_cast<size_t>(c), 0.0);
            for (int i = 0; i < n; ++i)
                for (int ci = 0; ci < c; ++ci) {
                    const double* xp = xn->value.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                    const double* gp = g.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                    const double mu = mean[ci], is = invstd[ci];
                    double sg = 0.0, sgx = 0.0;
                    for (int64_t j = 0; j < plane; ++j) {
                        sg += gp[j];
                        sgx += gp[j] * (xp[j] - mu) * is;
                    }
                    dbeta[static_cast<size_t>(ci)] += sg;
                    dgamma[static_cast<size_t>(ci)] += sgx;
                }
            if (gn->requires_grad) {
                gn->ensure_grad();
                for (int ci = 0; ci < c; ++ci) gn->grad[ci] += dgamma[static_cast<size_t>(ci)];
            }
            if (bn->requires_grad) {
                bn->ensure_grad();
                for (int ci = 0; ci < c; ++ci) bn->grad[ci] += dbeta[static_cast<size_t>(ci)];
            }
            if (xn->requires_grad) {
                xn->ensure_grad();
                const double* gm = gn->value.data();
                const double md = static_cast<double>(m);
                for (int i = 0; i < n; ++i)
                    for (int ci = 0; ci < c; ++ci) {
                        const double* xp = xn->value.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                        const double* gp = g.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                        double* dx = xn->grad.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                        const double mu = mean[ci], is = invstd[ci], ga = gm[ci];
                        if (training) {
                            const double a = ga * is / md;
                            const double sg = dbeta[static_cast<size_t>(ci)];
                            const double sgx = dgamma[static_cast<size_t>(ci)];
                            for (int64_t j = 0; j < plane; ++j) {
                                const double xhat = (xp[j] - mu) * is;
                                dx[j] += a * (md * gp[j] - sg - xhat * sgx);
                            }
                        } else {
                            const double a = ga * is;
                            for (int64_t j = 0; j < plane; ++j) dx[j] += a * gp[j];
                        }
                    }
            }
        });
}

Variable relu(const Variable& x) {
    const Tensor& xv = x.value();
    Tensor out(xv.shape());
    const double* p = xv.data();
    double* o = out.data();
    const int64_t total = xv.numel();
    for (int64_t i = 0; i < total; ++i) o[i] = p[i] > 0.0 ? p[i] : 0.0;
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn, total](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double* xp = xn->value.data();
        const double* gp = g.data();
        double* dx = xn->grad.data();
        for (int64_t i = 0; i < total; ++i)
            if (xp[i] > 0.0) dx[i] += gp[i];
    });
}

Variable sigmoid(const Variable& x) {
    const Tensor& xv = x.value();
    Tensor out(xv.shape());
    const double* p = xv.data();
    double* o = out.data();
    const int64_t total = xv.numel();
    for (int64_t i = 0; i < total; ++i) o[i] = 1.0 / (1.0 + std::exp(-p[i]));
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn, total](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double* xp = xn->value.data();
        const double* gp = g.data();
        double* dx = xn->grad.data();
        for (int64_t i = 0; i < total; ++i) {
            const double s = 1.0 / (1.0 + std::exp(-xp[i]));
            dx[i] += gp[i] * s * (1.0 - s);
        }
    });
}

Variable max_pool2d(const Variable& x, int kernel, int stride, int pad) {
    const Tensor& xv = x.value();
    require(xv.ndim() == 4, "max_pool2d: input must be 4-D");
    const int n = xv.n(), c = xv.c(), h = xv.h(), w = xv.w();
    const int oh = conv_out_dim(h, kernel, stride, pad, 1);
    const int ow = conv_out_dim(w, kernel, stride, pad, 1);
    require(oh >= 1 && ow >= 1, "max_pool2d: output would be empty");
    Tensor out({n, c, oh, ow});
    std::vector<int64_t> argmax(static_cast<size_t>(out.numel()));
    int64_t oi = 0;
    for (int i = 0; i < n; ++i)
        for (int ci = 0; ci < c; ++ci) {
            const double* plane = xv.data() + ((static_cast<int64_t>(i) * c + ci) * h) * w;
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox, ++oi) {
                    double best = -std::numeric_limits<double>::infinity();
                    int64_t besti = -1;
                    for (int ky = 0; ky < kernel; ++ky) {
                        const int iy = oy * stride - pad + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (int kx = 0; kx < kernel; ++kx) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= w) continue;
                            const double v = plane[static_cast<int64_t>(iy) * w + ix];
                            if (v > best) {
                                best = v;
                                besti = ((static_cast<int64_t>(i) * c + ci) * h + iy) * w + ix;
                            }
                        }
                    }
                    out[oi] = best;
                    argmax[static_cast<size_t>(oi)] = besti;
                }
        }
    auto xn = x.node();
    const int64_t total = out.numel();
    return Variable::make_op(std::move(out), {x}, [xn, argmax = std::move(argmax), total](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        double* dx = xn->grad.data();
        const double* gp = g.data();
        for (int64_t i = 0; i < total; ++i)
            if (argmax[static_cast<size_t>(i)] >= 0) dx[argmax[static_cast<size_t>(i)]] += gp[i];
    });
}

Variable global_avg_pool(const Variable& x) {
    const Tensor& xv = x.value();
    require(xv.ndim() == 4, "global_avg_pool: input must be 4-D");
    const int n = xv.n(), c = xv.c();
    const int64_t plane = static_cast<int64_t>(xv.h()) * xv.w();
    Tensor out({n, c, 1, 1});
    for (int i = 0; i < n; ++i)
        for (int ci = 0; ci < c; ++ci) {
            const double* p = xv.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
            double s = 0.0;
            for (int64_t j = 0; j < plane; ++j) s += p[j];
            out[static_cast<int64_t>(i) * c + ci] = s / static_cast<double>(plane);
        }
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn, n, c, plane](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (int i = 0; i < n; ++i)
            for (int ci = 0; ci < c; ++ci) {
                const double gv = g[static_cast<int64_t>(i) * c + ci] / static_cast<double>(plane);
                double* dx = xn->grad.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                for (int64_t j = 0; j < plane; ++j) dx[j] += gv;
            }
    });
}

Variable broadcast_hw(const Variable& x, int h, int w) {
    const Tensor& xv = x.value();
    require(xv.ndim() == 4 && xv.h() == 1 && xv.w() == 1, "broadcast_hw: input must be (N,C,1,1)");
    const int n = xv.n(), c = xv.c();
    const int64_t plane = static_cast<int64_t>(h) * w;
    Tensor out({n, c, h, w});
    for (int64_t i = 0; i < static_cast<int64_t>(n) * c; ++i) {
        double* o = out.data() + i * plane;
        const double v = xv[i];
        for (int64_t j = 0; j < plane; ++j) o[j] = v;
    }
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn, n, c, plane](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (int64_t i = 0; i < static_cast<int64_t>(n) * c; ++i) {
            const double* gp = g.data() + i * plane;
            double s = 0.0;
            for (int64_t j = 0; j < plane; ++j) s += gp[j];
            xn->grad[i] += s;
        }
    });
}

Variable upsample_bilinear(const Variable& x, int out_h, int out_w) {
    const Tensor& xv = x.value();
    require(xv.ndim() == 4, "upsample_bilinear: input must be 4-D");
    require(out_h >= 1 && out_w >= 1, "upsample_bilinear: invalid target size");
    const int n = xv.n(), c = xv.c(), h = xv.h(), w = xv.w();
    std::vector<BilinearIndex> ys(static_cast<size_t>(out_h)), xs(static_cast<size_t>(out_w));
    for (int i = 0; i < out_h; ++i) ys[static_cast<size_t>(i)] = bilinear_index(i, h, out_h);
    for (int i = 0; i < out_w; ++i) xs[static_cast<size_t>(i)] = bilinear_index(i, w, out_w);
    Tensor out({n, c, out_h, out_w});
    for (int i = 0; i < n; ++i)
        for (int ci = 0; ci < c; ++ci) {
            const double* plane = xv.data() + ((static_cast<int64_t>(i) * c + ci) * h) * w;
            double* o = out.data() + ((static_cast<int64_t>(i) * c + ci) * out_h) * static_cast<int64_t>(out_w);
            for (int oy = 0; oy < out_h; ++oy) {
                const auto& by = ys[static_cast<size_t>(oy)];
                const double* r0 = plane + static_cast<int64_t>(by.lo) * w;
                const double* r1 = plane + static_cast<int64_t>(by.hi) * w;
                for (int ox = 0; ox < out_w; ++ox) {
                    const auto& bx = xs[static_cast<size_t>(ox)];
                    const double top = r0[bx.lo] * (1.0 - bx.frac) + r0[bx.hi] * bx.frac;
                    const double bot = r1[bx.lo] * (1.0 - bx.frac) + r1[bx.hi] * bx.frac;
                    *o++ = top * (1.0 - by.frac) + bot * by.frac;
                }
            }
        }
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x},
                             [xn, ys = std::move(ys), xs = std::move(xs), n, c, h, w, out_h, out_w](const Tensor& g) {
                                 if (!xn->requires_grad) return;
                                 xn->ensure_grad();
                                 for (int i = 0; i < n; ++i)
                                     for (int ci = 0; ci < c; ++ci) {
                                         double* dplane = xn->grad.data() + ((static_cast<int64_t>(i) * c + ci) * h) * w;
                                         const double* gp = g.data() +
                                                            ((static_cast<int64_t>(i) * c + ci) * out_h) *
                                                                static_cast<int64_t>(out_w);
                                         for (int oy = 0; oy < out_h; ++oy) {
                                             const auto& by = ys[static_cast<size_t>(oy)];
                                             for (int ox = 0; ox < out_w; ++ox) {
                                                 const auto& bx = xs[static_cast<size_t>(ox)];
                                                 const double gv = *gp++;
                                                 dplane[static_cast<int64_t>(by.lo) * w + bx.lo] +=
                                                     gv * (1.0 - by.frac) * (1.0 - bx.frac);
                                                 dplane[static_cast<int64_t>(by.lo) * w + bx.hi] +=
                                                     gv * (1.0 - by.frac) * bx.frac;
                                                 dplane[static_cast<int64_t>(by.hi) * w + bx.lo] +=
                                                     gv * by.frac * (1.0 - bx.frac);
                                                 dplane[static_cast<int64_t>(by.hi) * w + bx.hi] +=
                                                     gv * by.frac * bx.frac;
                                             }
                                         }
                                     }
                             });
}

Variable concat_channels(const std::vector<Variable>& xs) {
    require(!xs.empty(), "concat_channels: empty input list");
    const Tensor& first = xs[0].value();
    require(first.ndim() == 4, "concat_channels: inputs must be 4-D");
    const int n = first.n(), h = first.h(), w = first.w();
    int ctotal = 0;
    for (const auto& v : xs) {
        const Tensor& t = v.value();
        require(t.ndim() == 4 && t.n() == n && t.h() == h && t.w() == w,
                "concat_channels: mismatched input " + t.shape_str() + " vs " + first.shape_str());
        ctotal += t.c();
    }
    const int64_t plane = static_cast<int64_t>(h) * w;
    Tensor out({n, ctotal, h, w});
    int coff = 0;
    for (const auto& v : xs) {
        const Tensor& t = v.value();
        for (int i = 0; i < n; ++i) {
            const double* src = t.data() + static_cast<int64_t>(i) * t.c() * plane;
            double* dst = out.data() + (static_cast<int64_t>(i) * ctotal + coff) * plane;
            std::copy(src, src + static_cast<int64_t>(t.c()) * plane, dst);
        }
        coff += t.c();
    }
    std::vector<VarNodePtr> nodes;
    std::vector<int> channels;
    for (const auto& v : xs) {
        nodes.push_back(v.node());
        channels.push_back(v.value().c());
    }
    return Variable::make_op(std::move(out), xs,
                             [nodes = std::move(nodes), channels = std::move(channels), n, ctotal, plane](const Tensor& g) {
                                 int coff = 0;
                                 for (size_t idx = 0; idx < nodes.size(); ++idx) {
                                     const int cc = channels[idx];
                                     auto& node = nodes[idx];
                                     if (node->requires_grad) {
                                         node->ensure_grad();
                                         for (int i = 0; i < n; ++i) {
                                             const double* src = g.data() + (static_cast<int64_t>(i) * ctotal + coff) * plane;
                                             double* dst = node->grad.data() + static_cast<int64_t>(i) * cc * plane;
                                             for (int64_t j = 0; j < static_cast<int64_t>(cc) * plane; ++j) dst[j] += src[j];
                                         }
                                     }
                                     coff += cc;
                                 }
                             });
}

Variable add(const Variable& a, const Variable& b) {
    require(a.value().same_shape(b.value()),
            "add: shape mismatch " + a.value().shape_str() + " vs " + b.value().shape_str());
    Tensor out = a.value();
    out.add_(b.value());
    auto an = a.node();
    auto bnn = b.node();
    return Variable::make_op(std::move(out), {a, b}, [an, bnn](const Tensor& g) {
        an->accumulate(g);
        bnn->accumulate(g);
    });
}

Variable mul(const Variable& a, const Variable& b) {
    require(a.value().same_shape(b.value()),
            "mul: shape mismatch " + a.value().shape_str() + " vs " + b.value().shape_str());
    const int64_t total = a.value().numel();
    Tensor out(a.value().shape());
    const double* pa = a.value().data();
    const double* pb = b.value().data();
    double* o = out.data();
    for (int64_t i = 0; i < total; ++i) o[i] = pa[i] * pb[i];
    auto an = a.node();
    auto bnn = b.node();
    return Variable::make_op(std::move(out), {a, b}, [an, bnn, total](const Tensor& g) {
        const double* gp = g.data();
        if (an->requires_grad) {
            an->ensure_grad();
            const double* pb = bnn->value.data();
            for (int64_t i = 0; i < total; ++i) an->grad.data()[i] += gp[i] * pb[i];
        }
        if (bnn->requires_grad) {
            bnn->ensure_grad();
            const double* pa = an->value.data();
            for (int64_t i = 0; i < total; ++i) bnn->grad.data()[i] += gp[i] * pa[i];
        }
    });
}

Variable mul_channel_broadcast(const Variable& x, const Variable& a) {
    const Tensor& xv = x.value();
    const Tensor& av = a.value();
    require(xv.ndim() == 4 && av.ndim() == 4, "mul_channel_broadcast: inputs must be 4-D");
    require(av.c() == 1, "mul_channel_broadcast: attention must have 1 channel, got " + av.shape_str());
    require(av.n() == xv.n() && av.h() == xv.h() && av.w() == xv.w(),
            "mul_channel_broadcast: spatial mismatch " + xv.shape_str() + " vs " + av.shape_str());
    const int n = xv.n(), c = xv.c();
    const int64_t plane = static_cast<int64_t>(xv.h()) * xv.w();
    Tensor out(xv.shape());
    for (int i = 0; i < n; ++i) {
        const double* ap = av.data() + static_cast<int64_t>(i) * plane;
        for (int ci = 0; ci < c; ++ci) {
            const double* xp = xv.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
            double* o = out.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
            for (int64_t j = 0; j < plane; ++j) o[j] = xp[j] * ap[j];
        }
    }
    auto xn = x.node();
    auto an = a.node();
    return Variable::make_op(std::move(out), {x, a}, [xn, an, n, c, plane](const Tensor& g) {
        if (xn->requires_grad) {
            xn->ensure_grad();
            for (int i = 0; i < n; ++i) {
                const double* ap = an->value.data() + static_cast<int64_t>(i) * plane;
                for (int ci = 0; ci < c; ++ci) {
                    const double* gp = g.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                    double* dx = xn->grad.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                    for (int64_t j = 0; j < plane; ++j) dx[j] += gp[j] * ap[j];
                }
            }
        }
        if (an->requires_grad) {
            an->ensure_grad();
            for (int i = 0; i < n; ++i) {
                double* da = an->grad.data() + static_cast<int64_t>(i) * plane;
                for (int ci = 0; ci < c; ++ci) {
                    const double* gp = g.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                    const double* xp = xn->value.data() + ((static_cast<int64_t>(i) * c + ci) * plane);
                    for (int64_t j = 0; j < plane; ++j) da[j] += gp[j] * xp[j];
                }
            }
        }
    });
}

Variable scale_rows(const Variable& x, const Variable& s) {
    const Tensor& xv = x.value();
    const Tensor& sv = s.value();
    require(xv.ndim() >= 1 && sv.ndim() == 1 && sv.dim(0) == xv.dim(0),
            "scale_rows: scalar vector must have one entry per sample");
    const int n = xv.dim(0);
    const int64_t row = xv.numel() / n;
    Tensor out(xv.shape());
    for (int i = 0; i < n; ++i) {
        const double k = sv[i];
        const double* xp = xv.data() + static_cast<int64_t>(i) * row;
        double* o = out.data() + static_cast<int64_t>(i) * row;
        for (int64_t j = 0; j < row; ++j) o[j] = xp[j] * k;
    }
    auto xn = x.node();
    auto sn = s.node();
    return Variable::make_op(std::move(out), {x, s}, [xn, sn, n, row](const Tensor& g) {
        if (xn->requires_grad) {
            xn->ensure_grad();
            for (int i = 0; i < n; ++i) {
                const double k = sn->value[i];
                const double* gp = g.data() + static_cast<int64_t>(i) * row;
                double* dx = xn->grad.data() + static_cast<int64_t>(i) * row;
                for (int64_t j = 0; j < row; ++j) dx[j] += gp[j] * k;
            }
        }
        if (sn->requires_grad) {
            sn->ensure_grad();
            for (int i = 0; i < n; ++i) {
                const double* gp = g.data() + static_cast<int64_t>(i) * row;
                const double* xp = xn->value.data() + static_cast<int64_t>(i) * row;
                double acc = 0.0;
                for (int64_t j = 0; j < row; ++j) acc += gp[j] * xp[j];
                sn->grad[i] += acc;
            }
        }
    });
}

Variable div_rows(const Variable& x, const Variable& s) {
    const Tensor& xv = x.value();
    const Tensor& sv = s.value();
    require(xv.ndim() >= 1 && sv.ndim() == 1 && sv.dim(0) == xv.dim(0),
            "div_rows: scalar vector must have one entry per sample");
    const int n = xv.dim(0);
    const int64_t row = xv.numel() / n;
    Tensor out(xv.shape());
    for (int i = 0; i < n; ++i) {
        const double k = sv[i];
        const double* xp = xv.data() + static_cast<int64_t>(i) * row;
        double* o = out.data() + static_cast<int64_t>(i) * row;
        for (int64_t j = 0; j < row; ++j) o[j] = xp[j] / k;
    }
    auto xn = x.node();
    auto sn = s.node();
    return Variable::make_op(std::move(out), {x, s}, [xn, sn, n, row](const Tensor& g) {
        for (int i = 0; i < n; ++i) {
            const double k = sn->value[i];
            const double* gp = g.data() + static_cast<int64_t>(i) * row;
            if (xn->requires_grad) {
                xn->ensure_grad();
                double* dx = xn->grad.data() + static_cast<int64_t>(i) * row;
                for (int64_t j = 0; j < row; ++j) dx[j] += gp[j] / k;
            }
            if (sn->requires_grad) {
                sn->ensure_grad();
                const double* xp = xn->value.data() + static_cast<int64_t>(i) * row;
                double acc = 0.0;
                for (int64_t j = 0; j < row; ++j) acc += gp[j] * xp[j];
                sn->grad[i] -= acc / (k * k);
            }
        }
    });
}

Variable scale(const Variable& x, double k) {
    Tensor out = x.value();
    out.scale_(k);
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn, k](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double* gp = g.data();
        double* dx = xn->grad.data();
        const int64_t total = g.numel();
        for (int64_t i = 0; i < total; ++i) dx[i] += gp[i] * k;
    });
}

Variable softmax_pairs(const Variable& a, const Variable& b) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    require(av.ndim() == 2 && av.same_shape(bv), "softmax_pairs: inputs must be matching (N,K)");
    const int n = av.dim(0), k = av.dim(1);
    Tensor out({n, k, 2});
    for (int64_t i = 0; i < static_cast<int64_t>(n) * k; ++i) {
        const double x0 = av[i], x1 = bv[i];
        const double m = std::max(x0, x1);
        const double e0 = std::exp(x0 - m), e1 = std::exp(x1 - m);
        const double s = e0 + e1;
        out[2 * i] = e0 / s;
        out[2 * i + 1] = e1 / s;
    }
    auto an = a.node();
    auto bnn = b.node();
    Tensor probs = out;
    return Variable::make_op(std::move(out), {a, b}, [an, bnn, probs = std::move(probs), n, k](const Tensor& g) {
        for (int64_t i = 0; i < static_cast<int64_t>(n) * k; ++i) {
            const double p0 = probs[2 * i], p1 = probs[2 * i + 1];
            const double d = (g[2 * i] - g[2 * i + 1]) * p0 * p1;
            if (an->requires_grad) {
                an->ensure_grad();
                an->grad[i] += d;
            }
            if (bnn->requires_grad) {
                bnn->ensure_grad();
                bnn->grad[i] -= d;
            }
        }
    });
}

Variable slice_pair(const Variable& table, int level, int col) {
    const Tensor& tv = table.value();
    require(tv.ndim() == 3 && tv.dim(2) == 2, "slice_pair: expected (N,K,2) table");
    require(level >= 0 && level < tv.dim(1) && (col == 0 || col == 1), "slice_pair: index out of range");
    const int n = tv.dim(0), k = tv.dim(1);
    Tensor out({n});
    for (int i = 0; i < n; ++i) out[i] = tv[(static_cast<int64_t>(i) * k + level) * 2 + col];
    auto tn = table.node();
    return Variable::make_op(std::move(out), {table}, [tn, n, k, level, col](const Tensor& g) {
        if (!tn->requires_grad) return;
        tn->ensure_grad();
        for (int i = 0; i < n; ++i) tn->grad[(static_cast<int64_t>(i) * k + level) * 2 + col] += g[i];
    });
}

Variable sum_pairs_column(const Variable& table, int col) {
    const Tensor& tv = table.value();
    require(tv.ndim() == 3 && tv.dim(2) == 2, "sum_pairs_column: expected (N,K,2) table");
    const int n = tv.dim(0), k = tv.dim(1);
    Tensor out({n});
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += tv[(static_cast<int64_t>(i) * k + j) * 2 + col];
        out[i] = s;
    }
    auto tn = table.node();
    return Variable::make_op(std::move(out), {table}, [tn, n, k, col](const Tensor& g) {
        if (!tn->requires_grad) return;
        tn->ensure_grad();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) tn->grad[(static_cast<int64_t>(i) * k + j) * 2 + col] += g[i];
    });
}

Variable sum_pairs_all(const Variable& table) {
    const Tensor& tv = table.value();
    require(tv.ndim() == 3 && tv.dim(2) == 2, "sum_pairs_all: expected (N,K,2) table");
    const int n = tv.dim(0);
    const int64_t row = tv.numel() / n;
    Tensor out({n});
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        const double* p = tv.data() + static_cast<int64_t>(i) * row;
        for (int64_t j = 0; j < row; ++j) s += p[j];
        out[i] = s;
    }
    auto tn = table.node();
    return Variable::make_op(std::move(out), {table}, [tn, n, row](const Tensor& g) {
        if (!tn->requires_grad) return;
        tn->ensure_grad();
        for (int i = 0; i < n; ++i) {
            double* dp = tn->grad.data() + static_cast<int64_t>(i) * row;
            for (int64_t j = 0; j < row; ++j) dp[j] += g[i];
        }
    });
}

Variable mul_mask(const Variable& x, const Tensor& mask) {
    require(x.value().same_shape(mask), "mul_mask: shape mismatch");
    const int64_t total = mask.numel();
    Tensor out(x.value().shape());
    for (int64_t i = 0; i < total; ++i) out[i] = x.value()[i] * mask[i];
    auto xn = x.node();
    Tensor m = mask;
    return Variable::make_op(std::move(out), {x}, [xn, m = std::move(m), total](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (int64_t i = 0; i < total; ++i) xn->grad[i] += g[i] * m[i];
    });
}

Variable reshape(const Variable& x, std::vector<int> shape) {
    require(shape_numel(shape) == x.value().numel(),
            "reshape: element count mismatch " + x.value().shape_str() + " -> " + Tensor::shape_str(shape));
    std::vector<double> data(x.value().data(), x.value().data() + x.value().numel());
    Tensor out(shape, std::move(data));
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const int64_t total = g.numel();
        for (int64_t i = 0; i < total; ++i) xn->grad[i] += g[i];
    });
}

Variable mean_all(const Variable& x) {
    const int64_t total = x.value().numel();
    require(total > 0, "mean_all: empty tensor");
    Tensor out({1}, x.value().sum() / static_cast<double>(total));
    auto xn = x.node();
    return Variable::make_op(std::move(out), {x}, [xn, total](const Tensor& g) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        const double gv = g[0] / static_cast<double>(total);
        double* dx = xn->grad.data();
        for (int64_t i = 0; i < total; ++i) dx[i] += gv;
    });
}

Variable bce_loss(const Variable& pred, const Tensor& target, double eps) {
    const Tensor& pv = pred.value();
    require(pv.same_shape(target),
            "bce_loss: shape mismatch " + pv.shape_str() + " vs " + target.shape_str());
    const int64_t total = pv.numel();
    require(total > 0, "bce_loss: empty input");
    double acc = 0.0;
    for (int64_t i = 0; i < total; ++i) {
        const double p = std::clamp(pv[i], eps, 1.0 - eps);
        const double g = target[i];
        acc -= g * std::log(p) + (1.0 - g) * std::log(1.0 - p);
    }
    Tensor out({1}, acc / static_cast<double>(total));
    auto pn = pred.node();
    Tensor tgt = target;
    return Variable::make_op(std::move(out), {pred}, [pn, tgt = std::move(tgt), eps, total](const Tensor& g) {
        if (!pn->requires_grad) return;
        pn->ensure_grad();
        const double gs = g[0] / static_cast<double>(total);
        for (int64_t i = 0; i < total; ++i) {
            const double p = pn->value[i];
            if (p <= eps || p >= 1.0 - eps) continue;  // clamp region: zero slope
            pn->grad[i] += gs * (p - tgt[i]) / (p * (1.0 - p));
        }
    });
}

}  // namespace stdmmf
