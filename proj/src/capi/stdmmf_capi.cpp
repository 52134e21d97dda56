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

#include "stdmmf/stdmmf.h"

#include <cstdio>
#include <memory>
#include <string>

#include "core/error.hpp"
#include "io/dataset.hpp"
#include "pipeline/checkpoint.hpp"
#include "pipeline/evaluate.hpp"
#include "pipeline/infer.hpp"
#include "pipeline/train.hpp"

using namespace stdmmf;

/// The opaque handle: model plus the config it was built from and the
/// bookkeeping needed to resume training.
struct stdmmf_model {
    TrainConfig config;
    std::unique_ptr<DualStreamNet> net;
    int epoch = 0;
    std::string rng_state;
};

namespace {

thread_local std::string t_last_error;

stdmmf_status fail(stdmmf_status code, const std::string& msg) {
    t_last_error = msg;
    return code;
}

stdmmf_status run(const std::function<void()>& fn) {
    try {
        fn();
        return STDMMF_OK;
    } catch (const ConfigError& e) {
        return fail(STDMMF_ERROR_CONFIG, e.what());
    } catch (const ShapeError& e) {
        return fail(STDMMF_ERROR_SHAPE, e.what());
    } catch (const IoError& e) {
        return fail(STDMMF_ERROR_IO, e.what());
    } catch (const DataError& e) {
        return fail(STDMMF_ERROR_DATA, e.what());
    } catch (const CheckpointError& e) {
        return fail(STDMMF_ERROR_CHECKPOINT, e.what());
    } catch (const DomainError& e) {
        return fail(STDMMF_ERROR_DOMAIN, e.what());
    } catch (const TrainingError& e) {
        return fail(STDMMF_ERROR_TRAINING, e.what());
    } catch (const std::exception& e) {
        return fail(STDMMF_ERROR_INTERNAL, e.what());
    }
}

BackboneConfig backbone_for(const TrainConfig& cfg) { return BackboneConfig::resnet34(cfg.input_size); }

}  // namespace

extern "C" {

const char* stdmmf_status_name(stdmmf_status status) {
    switch (status) {
        case STDMMF_OK: return "ok";
        case STDMMF_ERROR_INVALID_ARGUMENT: return "invalid argument";
        case STDMMF_ERROR_CONFIG: return "configuration error";
        case STDMMF_ERROR_SHAPE: return "shape error";
        case STDMMF_ERROR_IO: return "i/o error";
        case STDMMF_ERROR_DATA: return "data error";
        case STDMMF_ERROR_CHECKPOINT: return "checkpoint error";
        case STDMMF_ERROR_DOMAIN: return "domain error";
        case STDMMF_ERROR_TRAINING: return "training error";
        case STDMMF_ERROR_UNMATCHED_FILES: return "unmatched files";
        case STDMMF_ERROR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* stdmmf_last_error(void) { return t_last_error.c_str(); }

stdmmf_status stdmmf_model_create(const char* config_path, stdmmf_model** out_model) {
    if (!out_model) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "out_model is null");
    *out_model = nullptr;
    return run([&] {
        auto m = std::make_unique<stdmmf_model>();
        m->config = config_path ? load_train_config(config_path) : TrainConfig{};
        m->net = std::make_unique<DualStreamNet>(backbone_for(m->config), m->config.seed, m->config.flags(),
                                                 m->config.gate_threshold);
        m->rng_state = Rng(m->config.seed).save_state();
        *out_model = m.release();
    });
}

stdmmf_status stdmmf_model_open(const char* checkpoint_path, stdmmf_model** out_model) {
    if (!checkpoint_path || !out_model) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "null argument");
    *out_model = nullptr;
    return run([&] {
        const CheckpointHeader head = read_checkpoint_header(checkpoint_path);
        auto m = std::make_unique<stdmmf_model>();
        m->config = head.train_config;
        m->net = std::make_unique<DualStreamNet>(head.backbone, m->config.seed, m->config.flags(),
                                                 m->config.gate_threshold);
        const CheckpointHeader loaded = load_checkpoint(checkpoint_path, *m->net, nullptr);
        m->epoch = loaded.epoch;
        m->rng_state = loaded.rng_state;
        *out_model = m.release();
    });
}

stdmmf_status stdmmf_model_save(const stdmmf_model* model, const char* checkpoint_path) {
    if (!model || !checkpoint_path) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "null argument");
    return run([&] {
        save_checkpoint(checkpoint_path, *model->net, model->config, model->epoch, model->rng_state, nullptr);
    });
}

void stdmmf_model_free(stdmmf_model* model) { delete model; }

stdmmf_status stdmmf_train(stdmmf_model* model, const char* data_dir, const char* out_dir,
                           const stdmmf_train_options* options) {
    if (!model || !data_dir || !out_dir) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "null argument");
    return run([&] {
        TrainConfig cfg = model->config;
        TrainOptions opts;
        opts.out_dir = out_dir;
        if (options) {
            opts.deterministic = options->deterministic != 0;
            opts.max_steps = options->max_steps;
            cfg.disable_temporal = cfg.disable_temporal || options->disable_temporal;
            cfg.disable_ila = cfg.disable_ila || options->disable_ila;
            cfg.disable_ilw = cfg.disable_ilw || options->disable_ilw;
            cfg.disable_bma = cfg.disable_bma || options->disable_bma;
        }
        model->net->set_flags(cfg.flags());
        model->config = cfg;
        std::vector<std::string> warnings;
        const Dataset data = load_dataset(data_dir, Split::train, cfg.input_size, &warnings);
        for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        train_model(*model->net, cfg, data, opts);
        model->epoch = cfg.epochs;
    });
}

stdmmf_status stdmmf_infer(stdmmf_model* model, const char* data_dir, const char* out_dir, int write_overlay) {
    if (!model || !data_dir || !out_dir) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "null argument");
    return run([&] {
        std::vector<std::string> warnings;
        const Dataset data = load_dataset(data_dir, Split::test, model->config.input_size, &warnings);
        for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        model->net->set_training(false);
        run_inference(*model->net, data, out_dir, write_overlay != 0);
    });
}

stdmmf_status stdmmf_evaluate(const char* pred_dir, const char* gt_dir, const char* report_path,
                              stdmmf_metric_report* out_report) {
    if (!pred_dir || !gt_dir) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "null argument");
    EvalResult result;
    const stdmmf_status st = run([&] { result = evaluate_dirs(pred_dir, gt_dir); });
    if (st != STDMMF_OK) return st;
    if (out_report) {
        out_report->mae = result.report.mae;
        out_report->max_f = result.report.max_f;
        out_report->mean_f = result.report.mean_f;
        out_report->max_em = result.report.max_em;
        out_report->mean_em = result.report.mean_em;
        out_report->sm = result.report.sm;
    }
    if (report_path) {
        const stdmmf_status wst = run([&] {
            std::FILE* f = std::fopen(report_path, "wb");
            if (!f) throw IoError(std::string("cannot write report: ") + report_path);
            const std::string doc = format_report_kv(result.report);
            std::fwrite(doc.data(), 1, doc.size(), f);
            std::fclose(f);
        });
        if (wst != STDMMF_OK) return wst;
    }
    if (!result.unmatched_pred.empty() || !result.unmatched_gt.empty()) {
        std::string msg = "evaluation proceeded on the intersection;";
        for (const auto& p : result.unmatched_pred) msg += " pred-only: " + p;
        for (const auto& p : result.unmatched_gt) msg += " gt-only: " + p;
        return fail(STDMMF_ERROR_UNMATCHED_FILES, msg);
    }
    return STDMMF_OK;
}

stdmmf_status stdmmf_export_overlay(const char* pred_dir, const char* frames_dir, const char* out_dir) {
    if (!pred_dir || !frames_dir || !out_dir) return fail(STDMMF_ERROR_INVALID_ARGUMENT, "null argument");
    return run([&] { export_overlays(pred_dir, frames_dir, out_dir); });
}

}  // extern "C"
