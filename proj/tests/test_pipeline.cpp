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
#include <filesystem>
#include <fstream>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "golden_values.hpp"
#include "io/image.hpp"
#include "pipeline/evaluate.hpp"
#include "pipeline/infer.hpp"
#include "pipeline/train.hpp"
#include "synthetic_data.hpp"
#include "test_helpers.hpp"

using namespace stdmmf;
namespace fs = std::filesystem;
using test::random_tensor;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Tensor random_batch(int n, int s, Rng& rng) { return random_tensor({n, 3, s, s}, rng); }

}  // namespace

TEST_CASE("full forward: shapes, ranges and diagnostics on the tiny model") {
    DualStreamNet net(BackboneConfig::tiny(32), 11);
    net.set_training(false);
    Rng rng(12);
    NoGradGuard nograd;
    const ForwardResult r =
        net.forward(Variable::constant(random_batch(1, 32, rng)), Variable::constant(random_batch(1, 32, rng)));

    CHECK(r.out.value().shape() == std::vector<int>{1, 1, 32, 32});
    CHECK(r.out.value().min() > 0.0);
    CHECK(r.out.value().max() < 1.0);
    CHECK(r.i_sal.value().shape() == std::vector<int>{1, 1, 32, 32});
    CHECK(r.f_sal.value().shape() == std::vector<int>{1, 1, 32, 32});
    CHECK(r.interlayer.value().shape() == std::vector<int>{1, 5, 2});
    CHECK(r.gated.value().shape() == std::vector<int>{1, 5, 2});
    CHECK(r.bi_att.value().shape() == std::vector<int>{1, 1, 8, 8});
    const int sizes[4] = {8, 4, 2, 1};
    for (int i = 0; i < 4; ++i)
        CHECK(r.attentions[static_cast<size_t>(i)].value().shape() == std::vector<int>{1, 1, sizes[i], sizes[i]});
    for (int i = 0; i < 5; ++i)
        CHECK(r.spatial_levels[static_cast<size_t>(i)].value().same_shape(
            r.temporal_levels[static_cast<size_t>(i)].value()));
    for (int i = 0; i < 5; ++i) {
        const double row = r.interlayer.value()[2 * i] + r.interlayer.value()[2 * i + 1];
        CHECK(std::fabs(row - 1.0) < 1e-9);
    }
}

TEST_CASE("ablation: spatial-flow-only mode zeroes the temporal path and pins (1,0) rows") {
    AblationFlags flags;
    flags.disable_temporal = true;
    DualStreamNet net(BackboneConfig::tiny(32), 11, flags);
    net.set_training(false);
    Rng rng(13);
    NoGradGuard nograd;
    const ForwardResult r =
        net.forward(Variable::constant(random_batch(1, 32, rng)), Variable::constant(random_batch(1, 32, rng)));
    for (int i = 0; i < 5; ++i) {
        CHECK(r.temporal_levels[static_cast<size_t>(i)].value().min() == 0.0);
        CHECK(r.temporal_levels[static_cast<size_t>(i)].value().max() == 0.0);
    }
    for (int i = 0; i < 5; ++i) {
        CHECK(r.interlayer.value()[2 * i] == 1.0);
        CHECK(r.interlayer.value()[2 * i + 1] == 0.0);
    }
    // The gate keeps the (1,0) rows unchanged.
    for (int i = 0; i < 10; ++i) CHECK(r.gated.value()[i] == r.interlayer.value()[i]);
}

TEST_CASE("ablation: baseline wiring equals the plain pyramid bit-exactly") {
    AblationFlags flags;
    flags.disable_ila = true;
    DualStreamNet net(BackboneConfig::tiny(32), 11, flags);
    net.set_training(false);
    Rng rng(14);
    const Tensor frames = random_batch(1, 32, rng);
    NoGradGuard nograd;
    const ForwardResult r =
        net.forward(Variable::constant(frames), Variable::constant(random_batch(1, 32, rng)));
    CHECK_FALSE(r.attentions[0].defined());
    const auto plain = net.spatial_stream().backbone().extract_pyramid(Variable::constant(frames));
    for (int i = 0; i < 5; ++i)
        for (int64_t j = 0; j < plain[static_cast<size_t>(i)].value().numel(); ++j)
            CHECK(r.spatial_levels[static_cast<size_t>(i)].value()[j] == plain[static_cast<size_t>(i)].value()[j]);
}

TEST_CASE("ablation flags compose: everything disabled reduces to encoder + decoder") {
    AblationFlags flags{true, true, true, true};
    DualStreamNet net(BackboneConfig::tiny(32), 11, flags);
    net.set_training(false);
    Rng rng(15);
    NoGradGuard nograd;
    const ForwardResult r =
        net.forward(Variable::constant(random_batch(1, 32, rng)), Variable::constant(random_batch(1, 32, rng)));
    CHECK_FALSE(r.attentions[0].defined());
    CHECK_FALSE(r.bi_att.defined());
    for (int i = 0; i < 5; ++i) {
        CHECK(r.interlayer.value()[2 * i] == 1.0);
        CHECK(r.interlayer.value()[2 * i + 1] == 0.0);
    }
    CHECK(r.out.value().min() > 0.0);
    CHECK(r.out.value().max() < 1.0);

    // disable_ilw alone pins uniform rows.
    AblationFlags only_ilw;
    only_ilw.disable_ilw = true;
    DualStreamNet net2(BackboneConfig::tiny(32), 11, only_ilw);
    net2.set_training(false);
    const ForwardResult r2 =
        net2.forward(Variable::constant(random_batch(1, 32, rng)), Variable::constant(random_batch(1, 32, rng)));
    for (int i = 0; i < 10; ++i) CHECK(r2.interlayer.value()[i] == 0.5);
}

TEST_CASE("one optimizer step with zero momentum and decay moves by -lr*gradient") {
    DualStreamNet net(BackboneConfig::tiny(32), 21);
    net.set_training(false);
    Rng rng(22);
    const Tensor frames = random_batch(1, 32, rng);
    const Tensor flows = random_batch(1, 32, rng);
    const Tensor gt(std::vector<int>{1, 1, 32, 32}, 1.0);

    auto loss_of = [&]() {
        const ForwardResult r = net.forward(Variable::constant(frames), Variable::constant(flows));
        return combine_losses(bce_loss(r.i_sal, gt), bce_loss(r.f_sal, gt), bce_loss(r.out, gt));
    };
    net.zero_grad();
    Variable loss = loss_of();
    backward(loss);

    // Snapshot a few parameters, their gradients, and FD gradients.
    auto params = net.named_parameters();
    struct Probe {
        size_t pi;
        int64_t idx;
        double before, grad, fd;
    };
    std::vector<Probe> probes;
    Rng pick(23);
    for (int i = 0; i < 6; ++i) {
        const size_t pi = pick.integer(params.size());
        Tensor& t = const_cast<Variable&>(params[pi].second).value();
        const int64_t idx = static_cast<int64_t>(pick.integer(static_cast<uint64_t>(t.numel())));
        const double grad = params[pi].second.grad().defined() ? params[pi].second.grad()[idx] : 0.0;
        const double fd = test::finite_difference([&]() { return loss_of().value()[0]; }, t[idx]);
        probes.push_back({pi, idx, t[idx], grad, fd});
    }

    const double lr = 0.01;
    SgdOptimizer opt(params, lr, /*momentum=*/0.0, /*weight_decay=*/0.0);
    opt.step();
    for (const auto& p : probes) {
        const double after = params[p.pi].second.value()[p.idx];
        CHECK(after == doctest::Approx(p.before - lr * p.grad).epsilon(1e-12));
        if (std::fabs(p.fd) > 1e-7) CHECK(test::rel_error(p.fd, p.grad) < 1e-3);
    }
}

TEST_CASE("complete model parameter counts match the frozen golden values") {
    DualStreamNet tiny(BackboneConfig::tiny(32), 1);
    CHECK(tiny.parameter_count() == test::kTinyModelParams);
}

TEST_CASE("a zero learning rate is an exact no-op step") {
    DualStreamNet net(BackboneConfig::tiny(32), 77);
    auto params = net.named_parameters();
    // Nonzero gradients and decay so only lr=0 can keep everything fixed.
    for (auto& [name, v] : params) {
        const_cast<Variable&>(v).node()->ensure_grad();
        const_cast<Variable&>(v).node()->grad.fill(0.3);
    }
    std::vector<double> before;
    for (auto& [name, v] : params) before.push_back(v.value()[0]);
    SgdOptimizer opt(params, /*lr=*/0.0, /*momentum=*/0.9, /*weight_decay=*/1e-5);
    opt.step();
    opt.step();
    size_t i = 0;
    for (auto& [name, v] : params) CHECK(v.value()[0] == before[i++]);
}

TEST_CASE("training: zero learning rate leaves parameters unchanged") {
    test::TempDir data("train_lr0");
    test::write_synthetic_video(data.path(), "vid", 4, 32, 3);
    const Dataset ds = load_dataset(data.str(), Split::train, 32);

    DualStreamNet net(BackboneConfig::tiny(32), 5);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.input_size = 32;
    cfg.learning_rate = 1e-30;  // effectively zero but valid
    cfg.momentum = 0.0;
    cfg.weight_decay = 0.0;
    cfg.seed = 5;
    std::vector<double> before;
    for (auto& [name, v] : net.named_parameters()) before.push_back(v.value()[0]);
    train_model(net, cfg, ds);
    size_t i = 0;
    for (auto& [name, v] : net.named_parameters()) {
        CHECK(v.value()[0] == doctest::Approx(before[i]).epsilon(1e-18));
        ++i;
    }
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    test::TempDir data("train_det");
    test::write_synthetic_video(data.path(), "vid", 8, 32, 4);
    const Dataset ds = load_dataset(data.str(), Split::train, 32);

    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.input_size = 32;
    cfg.seed = 17;
    auto run = [&]() {
        DualStreamNet net(BackboneConfig::tiny(32), cfg.seed);
        std::vector<StepStats> stats;
        TrainOptions opts;
        opts.max_steps = 2;
        train_model(net, cfg, ds, opts, &stats);
        return stats;
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].losses.total == b[i].losses.total);
        CHECK(a[i].losses.loss1 == b[i].losses.loss1);
    }
}

TEST_CASE("non-finite losses abort with the step index and diagnostics") {
    test::TempDir data("train_nan");
    test::write_synthetic_video(data.path(), "vid", 4, 32, 6);
    const Dataset ds = load_dataset(data.str(), Split::train, 32);
    DualStreamNet net(BackboneConfig::tiny(32), 5);
    // Poison the output head bias; its path to the loss has no rectifier
    // that could clamp the NaN away.
    for (auto& [name, v] : net.named_parameters())
        if (name == "decoder.conv_out.bias") const_cast<Variable&>(v).value()[0] = std::nan("");
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.input_size = 32;
    CHECK_THROWS_MSG(train_model(net, cfg, ds), TrainingError, "step 1");
}

TEST_CASE("inference: quantization, layout, idempotence, overlay flag") {
    test::TempDir data("infer_data");
    test::write_synthetic_video(data.path(), "vid", 2, 40, 8);  // original 40x40
    const Dataset ds = load_dataset(data.str(), Split::test, 32);

    DualStreamNet net(BackboneConfig::tiny(32), 9);
    net.set_training(false);
    // Zero decoder output head: OUT is exactly 0.5 -> pixels 128.
    test::zero_params(net);

    test::TempDir out("infer_out");
    run_inference(net, ds, out.str(), /*overlay=*/false);
    const std::string map_path = (out.path() / "vid" / "00000.png").string();
    REQUIRE(fs::exists(map_path));
    const Tensor map = load_image_gray(map_path);
    CHECK(map.shape() == std::vector<int>{40, 40});
    for (int64_t i = 0; i < map.numel(); ++i) CHECK(map[i] == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK_FALSE(fs::exists(out.path() / "vid" / "00000_overlay.png"));

    const std::string bytes1 = slurp(map_path);
    run_inference(net, ds, out.str(), false);
    CHECK(slurp(map_path) == bytes1);

    run_inference(net, ds, out.str(), /*overlay=*/true);
    CHECK(fs::exists(out.path() / "vid" / "00000_overlay.png"));

    test::TempDir ovout("overlay_out");
    export_overlays(out.str(), data.str(), ovout.str());
    CHECK(fs::exists(ovout.path() / "vid" / "00000_overlay.png"));
}

TEST_CASE("evaluate: self-comparison is perfect; unmatched files are listed") {
    test::TempDir gt("eval_gt");
    fs::create_directories(gt.path() / "vid");
    Rng rng(31);
    for (int i = 0; i < 3; ++i) {
        Tensor mask({24, 24});
        for (int64_t j = 0; j < mask.numel(); ++j) mask[j] = rng.uniform() < 0.4 ? 1.0 : 0.0;
        char name[16];
        std::snprintf(name, sizeof(name), "%05d.png", i);
        save_image_gray((gt.path() / "vid" / name).string(), mask);
    }

    const EvalResult self = evaluate_dirs(gt.str(), gt.str());
    CHECK(self.report.mae == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(self.report.max_f == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(self.report.sm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(self.frames == 3);
    CHECK(self.unmatched_pred.empty());

    // A prediction at half intensity against a half-ones gt.
    test::TempDir pred("eval_pred");
    fs::create_directories(pred.path() / "vid");
    Tensor half({24, 24}, 0.5);
    Tensor half_gt({24, 24});
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 12; ++x) half_gt[static_cast<int64_t>(y) * 24 + x] = 1.0;
    save_image_gray((pred.path() / "vid" / "only.png").string(), half);
    test::TempDir gt2("eval_gt2");
    fs::create_directories(gt2.path() / "vid");
    save_image_gray((gt2.path() / "vid" / "only.png").string(), half_gt);
    const EvalResult r = evaluate_dirs(pred.str(), gt2.str());
    CHECK(r.report.mae == doctest::Approx(0.5).epsilon(1e-2));

    // Unmatched extras are reported while evaluation proceeds.
    save_image_gray((pred.path() / "vid" / "extra.png").string(), half);
    const EvalResult u = evaluate_dirs(pred.str(), gt2.str());
    CHECK(u.frames == 1);
    REQUIRE(u.unmatched_pred.size() == 1);
    CHECK(u.unmatched_pred[0].find("extra.png") != std::string::npos);
}

TEST_CASE("evaluate ignores overlay visualizations written next to the maps") {
    test::TempDir pred("eval_ov_p");
    test::TempDir gt("eval_ov_g");
    fs::create_directories(pred.path() / "v");
    fs::create_directories(gt.path() / "v");
    Tensor m({8, 8}, 1.0);
    save_image_gray((pred.path() / "v" / "a.png").string(), m);
    save_image_gray((pred.path() / "v" / "a_overlay.png").string(), m);
    save_image_gray((gt.path() / "v" / "a.png").string(), m);
    const EvalResult r = evaluate_dirs(pred.str(), gt.str());
    CHECK(r.frames == 1);
    CHECK(r.unmatched_pred.empty());
}

TEST_CASE("evaluate resizes predictions to the ground-truth size") {
    test::TempDir pred("eval_rs_p");
    test::TempDir gt("eval_rs_g");
    fs::create_directories(pred.path() / "v");
    fs::create_directories(gt.path() / "v");
    // Low-resolution prediction of a left-half blob against a hi-res mask.
    Tensor p({12, 12});
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 6; ++x) p[static_cast<int64_t>(y) * 12 + x] = 1.0;
    Tensor g({24, 24});
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 12; ++x) g[static_cast<int64_t>(y) * 24 + x] = 1.0;
    save_image_gray((pred.path() / "v" / "a.png").string(), p);
    save_image_gray((gt.path() / "v" / "a.png").string(), g);
    const EvalResult r = evaluate_dirs(pred.str(), gt.str());
    CHECK(r.report.mae < 0.05);  // only the blended boundary column differs
    CHECK(r.report.max_f > 0.95);
}

TEST_CASE("evaluation is independent of file enumeration order") {
    // Names chosen to sort differently from creation order; the pairing set
    // is sorted, so the aggregate must not depend on creation order.
    test::TempDir pred("eval_order_p");
    test::TempDir gt("eval_order_g");
    fs::create_directories(pred.path() / "v");
    fs::create_directories(gt.path() / "v");
    Rng rng(32);
    for (const char* name : {"zz.png", "aa.png", "mm.png"}) {
        Tensor p({16, 16});
        Tensor g({16, 16});
        for (int64_t j = 0; j < p.numel(); ++j) {
            p[j] = rng.uniform();
            g[j] = rng.uniform() < 0.5 ? 1.0 : 0.0;
        }
        save_image_gray((pred.path() / "v" / name).string(), p);
        save_image_gray((gt.path() / "v" / name).string(), g);
    }
    const EvalResult a = evaluate_dirs(pred.str(), gt.str());
    const EvalResult b = evaluate_dirs(pred.str(), gt.str());
    CHECK(a.report.mae == b.report.mae);
    CHECK(a.report.max_em == b.report.max_em);
}

TEST_CASE("group construction follows videos and clip length") {
    test::TempDir data("groups");
    test::write_synthetic_video(data.path(), "a", 5, 32, 41);
    test::write_synthetic_video(data.path(), "b", 4, 32, 42);
    const Dataset ds = load_dataset(data.str(), Split::train, 32);
    const auto groups = build_groups(ds, 4);
    REQUIRE(groups.size() == 3);  // a: 4+1, b: 4
    CHECK(groups[0].size() == 4);
    CHECK(groups[1].size() == 1);
    CHECK(groups[2].size() == 4);
    // No group crosses a video boundary.
    for (const auto& g : groups) {
        const std::string vid = ds.records()[g[0]].video_id;
        for (size_t idx : g) CHECK(ds.records()[idx].video_id == vid);
    }
}

TEST_CASE("evaluate over files matches the oracle aggregation pipeline") {
    // Ten random pairs written as PNGs, scored both by the production
    // directory walker and by a hand-rolled aggregation over the reloaded
    // (quantized) maps.
    test::TempDir pred("eval_oracle_p");
    test::TempDir gt("eval_oracle_g");
    fs::create_directories(pred.path() / "v");
    fs::create_directories(gt.path() / "v");
    Rng rng(71);
    for (int i = 0; i < 10; ++i) {
        Tensor p = random_tensor({12, 12}, rng, 0.0, 1.0);
        Tensor g({12, 12});
        for (int64_t j = 0; j < g.numel(); ++j) g[j] = rng.uniform() < 0.45 ? 1.0 : 0.0;
        const std::string name = "f" + std::to_string(i) + ".png";
        save_image_gray((pred.path() / "v" / name).string(), p);
        save_image_gray((gt.path() / "v" / name).string(), g);
    }
    const EvalResult got = evaluate_dirs(pred.str(), gt.str());

    std::vector<FrameMetrics> frames;
    for (int i = 0; i < 10; ++i) {
        const std::string name = "f" + std::to_string(i) + ".png";
        Tensor p = load_image_gray((pred.path() / "v" / name).string());
        Tensor graw = load_image_gray((gt.path() / "v" / name).string());
        Tensor g(graw.shape());
        for (int64_t j = 0; j < graw.numel(); ++j) g[j] = graw[j] >= 0.5 ? 1.0 : 0.0;
        frames.push_back(evaluate_frame(p, g));
    }
    const MetricReport expect = aggregate(frames);
    CHECK(std::fabs(got.report.mae - expect.mae) < 1e-9);
    CHECK(std::fabs(got.report.max_f - expect.max_f) < 1e-9);
    CHECK(std::fabs(got.report.mean_f - expect.mean_f) < 1e-9);
    CHECK(std::fabs(got.report.max_em - expect.max_em) < 1e-9);
    CHECK(std::fabs(got.report.mean_em - expect.mean_em) < 1e-9);
    CHECK(std::fabs(got.report.sm - expect.sm) < 1e-9);
}

TEST_CASE("config files: round trip, defaults, unknown keys") {
    TrainConfig cfg;
    cfg.learning_rate = 3e-4;
    cfg.seed = 99;
    cfg.disable_ilw = true;
    const TrainConfig back = parse_train_config_text(serialize_train_config(cfg));
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.seed == cfg.seed);
    CHECK(back.disable_ilw == cfg.disable_ilw);
    CHECK(back.epochs == 65);
    CHECK(back.momentum == 0.9);
    CHECK(back.weight_decay == 0.00001);
    CHECK(back.clip_len == 4);

    CHECK_THROWS_MSG((void)parse_train_config_text("nonsense_key = 3\n"), ConfigError, "nonsense_key");
    CHECK_THROWS_MSG((void)parse_train_config_text("epochs = banana\n"), ConfigError, "integer");
    CHECK_THROWS_MSG((void)parse_train_config_text("epochs 3\n"), ConfigError, "key = value");
    CHECK_NOTHROW((void)parse_train_config_text("# comment\n\nepochs = 3\n"));

    // Field invariants.
    CHECK_THROWS_MSG((void)parse_train_config_text("input_size = 33\n"), ConfigError, "input_size");
    CHECK_THROWS_MSG((void)parse_train_config_text("clip_len = 0\n"), ConfigError, "clip_len");
    CHECK_THROWS_MSG((void)parse_train_config_text("gate_threshold = 1.5\n"), ConfigError, "gate_threshold");
    CHECK_THROWS_MSG((void)parse_train_config_text("learning_rate = 0\n"), ConfigError, "learning_rate");
}

TEST_CASE("worker thread count honors the environment cap") {
    unsetenv("STDMMF_NUM_THREADS");
    CHECK(worker_threads(0) >= 1);
    CHECK(worker_threads(7) == 7);
    setenv("STDMMF_NUM_THREADS", "2", 1);
    CHECK(worker_threads(0) <= 2);  // caps only; cannot exceed the hardware count
    setenv("STDMMF_NUM_THREADS", "1", 1);
    CHECK(worker_threads(0) == 1);
    unsetenv("STDMMF_NUM_THREADS");
}
