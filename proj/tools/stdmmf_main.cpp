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

// Command-line front end over the stdmmf C API.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

#include "stdmmf/stdmmf.h"

namespace {

int report_failure(const char* what, stdmmf_status st) {
    std::fprintf(stderr, "%s failed: %s: %s\n", what, stdmmf_status_name(st), stdmmf_last_error());
    return st == STDMMF_ERROR_UNMATCHED_FILES ? 2 : 1;
}

struct ModelHandle {
    stdmmf_model* m = nullptr;
    ~ModelHandle() { stdmmf_model_free(m); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-stream (frame + optical flow) salient object detection toolkit"};
    app.require_subcommand(1);

    // train
    std::string train_config, train_data, train_out;
    stdmmf_train_options topts{};
    auto* train = app.add_subcommand("train", "Train a model from scratch");
    train->add_option("--config", train_config, "Training config file (key = value)")->required();
    train->add_option("--data", train_data, "Dataset root: <video>/{frames,flow,gt}/NNNNN.png")->required();
    train->add_option("--out", train_out, "Output directory for checkpoints and train.log")->required();
    train->add_flag_function("--deterministic", [&](int64_t) { topts.deterministic = 1; },
                             "Single-threaded, bitwise-reproducible run");
    train->add_flag_function("--disable-temporal", [&](int64_t) { topts.disable_temporal = 1; },
                             "Spatial-flow-only ablation");
    train->add_flag_function("--disable-ila", [&](int64_t) { topts.disable_ila = 1; },
                             "Drop inter-layer attention (plain spatial pyramid)");
    train->add_flag_function("--disable-ilw", [&](int64_t) { topts.disable_ilw = 1; },
                             "Uniform 0.5/0.5 stream weights");
    train->add_flag_function("--disable-bma", [&](int64_t) { topts.disable_bma = 1; },
                             "Skip the bimodal attention product");

    // infer
    std::string infer_ckpt, infer_data, infer_out;
    bool overlay = false;
    auto* infer = app.add_subcommand("infer", "Write saliency maps for a dataset");
    infer->add_option("--checkpoint", infer_ckpt, "Checkpoint file")->required();
    infer->add_option("--data", infer_data, "Dataset root (gt optional)")->required();
    infer->add_option("--out", infer_out, "Output directory")->required();
    infer->add_flag("--overlay", overlay, "Also write blended overlay images");

    // eval
    std::string eval_pred, eval_gt, eval_report;
    auto* eval = app.add_subcommand("eval", "Score prediction maps against ground truth");
    eval->add_option("--pred", eval_pred, "Prediction directory")->required();
    eval->add_option("--gt", eval_gt, "Ground-truth directory")->required();
    eval->add_option("--report", eval_report, "Write the key/value metric report here");

    // export-overlay
    std::string ov_pred, ov_frames, ov_out;
    auto* exov = app.add_subcommand("export-overlay", "Blend saved saliency maps over the original frames");
    exov->add_option("--pred", ov_pred, "Prediction directory")->required();
    exov->add_option("--frames", ov_frames, "Frames directory (mirrors predictions or dataset layout)")->required();
    exov->add_option("--out", ov_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (train->parsed()) {
        ModelHandle h;
        stdmmf_status st = stdmmf_model_create(train_config.c_str(), &h.m);
        if (st != STDMMF_OK) return report_failure("model create", st);
        st = stdmmf_train(h.m, train_data.c_str(), train_out.c_str(), &topts);
        if (st != STDMMF_OK) return report_failure("train", st);
        std::printf("training finished; checkpoints in %s\n", train_out.c_str());
        return 0;
    }
    if (infer->parsed()) {
        ModelHandle h;
        stdmmf_status st = stdmmf_model_open(infer_ckpt.c_str(), &h.m);
        if (st != STDMMF_OK) return report_failure("checkpoint open", st);
        st = stdmmf_infer(h.m, infer_data.c_str(), infer_out.c_str(), overlay ? 1 : 0);
        if (st != STDMMF_OK) return report_failure("infer", st);
        std::printf("saliency maps written to %s\n", infer_out.c_str());
        return 0;
    }
    if (eval->parsed()) {
        stdmmf_metric_report r{};
        const stdmmf_status st =
            stdmmf_evaluate(eval_pred.c_str(), eval_gt.c_str(), eval_report.empty() ? nullptr : eval_report.c_str(), &r);
        if (st != STDMMF_OK && st != STDMMF_ERROR_UNMATCHED_FILES) return report_failure("eval", st);
        std::printf("  metric   |   value\n  ---------+---------\n");
        std::printf("  MAE      | %8.6f\n  max-F    | %8.6f\n  mean-F   | %8.6f\n", r.mae, r.max_f, r.mean_f);
        std::printf("  max-Em   | %8.6f\n  mean-Em  | %8.6f\n  Sm       | %8.6f\n", r.max_em, r.mean_em, r.sm);
        if (st == STDMMF_ERROR_UNMATCHED_FILES) {
            std::fprintf(stderr, "warning: %s\n", stdmmf_last_error());
            return 2;
        }
        return 0;
    }
    if (exov->parsed()) {
        const stdmmf_status st = stdmmf_export_overlay(ov_pred.c_str(), ov_frames.c_str(), ov_out.c_str());
        if (st != STDMMF_OK) return report_failure("export-overlay", st);
        std::printf("overlays written to %s\n", ov_out.c_str());
        return 0;
    }
    return 1;
}
