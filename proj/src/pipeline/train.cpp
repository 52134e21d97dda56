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

#include "pipeline/train.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace fs = std::filesystem;

namespace stdmmf {

std::vector<std::vector<size_t>> build_groups(const Dataset& data, int clip_len) {
    std::vector<std::vector<size_t>> groups;
    const auto& recs = data.records();
    size_t i = 0;
    while (i < recs.size()) {
        size_t j = i;
        while (j < recs.size() && recs[j].video_id == recs[i].video_id) ++j;
        for (size_t b = i; b < j; b += static_cast<size_t>(clip_len)) {
            std::vector<size_t> g;
            for (size_t k = b; k < std::min(j, b + static_cast<size_t>(clip_len)); ++k) g.push_back(k);
            groups.push_back(std::move(g));
        }
        i = j;
    }
    return groups;
}

namespace {

struct Batch {
    Tensor frames, flows, gt;
};

Batch assemble(const Dataset& data, const std::vector<size_t>& group, int size) {
    const int n = static_cast<int>(group.size());
    Batch b{Tensor({n, 3, size, size}), Tensor({n, 3, size, size}), Tensor({n, 1, size, size})};
    const int64_t img = static_cast<int64_t>(3) * size * size;
    const int64_t map = static_cast<int64_t>(size) * size;
    for (int k = 0; k < n; ++k) {
        LoadedSample s = data.load(group[static_cast<size_t>(k)]);
        if (!s.gt.defined())
            throw DataError("training sample without ground truth: " +
                            data.records()[group[static_cast<size_t>(k)]].video_id + "/" +
                            data.records()[group[static_cast<size_t>(k)]].stem);
        std::copy(s.frame.data(), s.frame.data() + img, b.frames.data() + k * img);
        std::copy(s.flow.data(), s.flow.data() + img, b.flows.data() + k * img);
        std::copy(s.gt.data(), s.gt.data() + map, b.gt.data() + k * map);
    }
    return b;
}

std::string param_stats(const DualStreamNet& model) {
    double mn = 0, mx = 0, sum = 0;
    int64_t count = 0;
    bool first = true;
    for (const auto& [name, v] : model.named_parameters()) {
        const Tensor& t = v.value();
        if (first) {
            mn = t.min();
            mx = t.max();
            first = false;
        } else {
            mn = std::min(mn, t.min());
            mx = std::max(mx, t.max());
        }
        sum += t.sum();
        count += t.numel();
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "param min %.6g max %.6g mean %.6g", mn, mx,
                  count ? sum / static_cast<double>(count) : 0.0);
    return buf;
}

std::string diag_stats(const ForwardResult& r) {
    std::string s;
    for (int i = 0; i < 4; ++i)
        if (r.attentions[static_cast<size_t>(i)].defined()) {
            const Tensor& a = r.attentions[static_cast<size_t>(i)].value();
            char buf[96];
            std::snprintf(buf, sizeof(buf), " A%d[%.4f,%.4f]", i + 1, a.min(), a.max());
            s += buf;
        }
    if (r.bi_att.defined()) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), " Bi[%.4f,%.4f]", r.bi_att.value().min(), r.bi_att.value().max());
        s += buf;
    }
    return s;
}

}  // namespace

std::string train_model(DualStreamNet& model, const TrainConfig& cfg, const Dataset& data, const TrainOptions& opts,
                        std::vector<StepStats>* stats) {
    cfg.validate();
    if (data.empty()) throw DataError("training dataset is empty");

    model.set_training(true);
    if (opts.deterministic) set_single_thread_mode(true);
    SgdOptimizer opt(model.named_parameters(), cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    Rng rng(cfg.seed);

    std::ofstream log;
    if (!opts.out_dir.empty()) {
        fs::create_directories(opts.out_dir);
        log.open(fs::path(opts.out_dir) / "train.log", std::ios::app);
    }
    auto log_line = [&](const std::string& line) {
        if (log.is_open()) log << line << "\n" << std::flush;
    };

    const auto groups = build_groups(data, cfg.clip_len);
    std::string last_ckpt;
    int step = 0;
    bool stopped = false;
    for (int epoch = 1; epoch <= cfg.epochs && !stopped; ++epoch) {
        // Fisher-Yates over group order, driven by the checkpointed RNG.
        std::vector<size_t> order(groups.size());
        for (size_t k = 0; k < order.size(); ++k) order[k] = k;
        for (size_t k = order.size(); k > 1; --k)
            std::swap(order[k - 1], order[static_cast<size_t>(rng.integer(k))]);

        for (size_t oi = 0; oi < order.size(); ++oi) {
            const Batch batch = assemble(data, groups[order[oi]], cfg.input_size);
            const ForwardResult r =
                model.forward(Variable::constant(batch.frames), Variable::constant(batch.flows));
            const Variable l1 = bce_loss(r.i_sal, batch.gt);
            const Variable l2 = bce_loss(r.f_sal, batch.gt);
            const Variable l3 = bce_loss(r.out, batch.gt);
            const Variable total = combine_losses(l1, l2, l3, cfg.loss_w1, cfg.loss_w2);
            ++step;
            const LossReport rep =
                total_loss(l1.value()[0], l2.value()[0], l3.value()[0], cfg.loss_w1, cfg.loss_w2);
            if (!std::isfinite(rep.total)) {
                const std::string diag = "non-finite loss at step " + std::to_string(step) + ": loss1 " +
                                         std::to_string(rep.loss1) + " loss2 " + std::to_string(rep.loss2) +
                                         " loss3 " + std::to_string(rep.loss3) + "; " + param_stats(model) + ";" +
                                         diag_stats(r);
                log_line(diag);
                throw TrainingError(diag);
            }
            model.zero_grad();
            backward(total);
            opt.step();

            char buf[256];
            std::snprintf(buf, sizeof(buf), "epoch %d step %d loss1 %.6f loss2 %.6f loss3 %.6f total %.6f", epoch,
                          step, rep.loss1, rep.loss2, rep.loss3, rep.total);
            log_line(buf);
            if (stats) stats->push_back({epoch, step, rep});
            if (opts.on_step) opts.on_step({epoch, step, rep});
            if (opts.max_steps > 0 && step >= opts.max_steps) {
                stopped = true;
                break;
            }
        }

        if (!opts.out_dir.empty()) {
            char name[64];
            std::snprintf(name, sizeof(name), "epoch_%03d.ckpt", epoch);
            const std::string path = (fs::path(opts.out_dir) / name).string();
            save_checkpoint(path, model, cfg, epoch, rng.save_state(), &opt);
            save_checkpoint((fs::path(opts.out_dir) / "latest.ckpt").string(), model, cfg, epoch, rng.save_state(),
                            &opt);
            last_ckpt = path;
        }
    }
    return last_ckpt;
}

}  // namespace stdmmf
